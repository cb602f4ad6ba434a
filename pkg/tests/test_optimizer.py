import json
import math

import numpy as np
import pytest

from diamondlab import (
    CapacityError,
    Embedding,
    MetricMatrix,
    OptimizerConfig,
    certified_lower_bound,
    evaluate_distortion,
    optimize_embedding,
)
from diamondlab.optimizer import SmoothedObjective, report_json

from conftest import diamond_metric, random_metric

SQUARE = [[0, 0], [1, 1], [1, 0], [0, 1]]  # s, t, a, b
L1_SQUARE = [[0, 0], [0.5, 0.5], [0.5, 0], [0, 0.5]]

# optimal Euclidean distortion of G_2, from the semidefinite program
#   min c  s.t.  d_ij^2 <= |x_i - x_j|^2 <= c d_ij^2  over Gram matrices
# solved with cvxpy/SCS (sqrt of the optimum); see test_g2_euclidean_sdp.
G2_EUCLIDEAN_OPT = 1.79123


def test_unit_square_in_l2():
    rep = evaluate_distortion(diamond_metric(1), Embedding(SQUARE, 2.0))
    assert rep.expansion == pytest.approx(2.0)
    assert rep.contraction == pytest.approx(1 / math.sqrt(2))
    assert rep.distortion == pytest.approx(math.sqrt(2), rel=1e-12)
    assert rep.witness_expansion == (0, 2)
    # pairs (0, 1) and (2, 3) tie at ratio sqrt(2); the lexicographic one wins
    assert rep.witness_contraction == (0, 1)


def test_l1_square_is_isometric():
    rep = evaluate_distortion(diamond_metric(1), Embedding(L1_SQUARE, 1.0))
    assert rep.distortion == pytest.approx(1.0, rel=1e-12)
    assert rep.expansion == pytest.approx(1.0)


def test_collapse_signals_infinite_distortion():
    rep = evaluate_distortion(diamond_metric(1), Embedding(np.zeros((4, 2)), 2.0))
    assert rep.distortion == math.inf and not rep.is_finite
    assert rep.witness_contraction == (0, 1)
    coords = np.array(SQUARE, dtype=float)
    coords[3] = coords[2]
    rep = evaluate_distortion(diamond_metric(1), Embedding(coords, 2.0))
    assert rep.distortion == math.inf
    assert rep.witness_contraction == (2, 3)


def test_evaluate_errors():
    with pytest.raises(ValueError):
        evaluate_distortion(diamond_metric(1), Embedding(np.zeros((3, 2)), 2.0))


def test_distortion_scale_invariance(rng):
    m = diamond_metric(2)
    f = Embedding(rng.standard_normal((12, 3)), 1.5)
    base = evaluate_distortion(m, f)
    for c in [1e-3, 0.7, 42.0]:
        rep = evaluate_distortion(m, f.scaled(c))
        assert rep.expansion == pytest.approx(c * base.expansion, rel=1e-12)
        assert rep.contraction == pytest.approx(base.contraction / c, rel=1e-12)
        assert rep.distortion == pytest.approx(base.distortion, rel=1e-12)
        assert rep.distortion >= 1


def test_brute_force_ratios(rng):
    m = MetricMatrix(random_metric(rng, 7))
    X = rng.standard_normal((7, 2))
    rep = evaluate_distortion(m, Embedding(X, 1.3))
    ratios = [sum(abs(X[i] - X[j]) ** 1.3) ** (1 / 1.3) / m[i, j]
              for i in range(7) for j in range(i + 1, 7)]
    assert rep.distortion == pytest.approx(max(ratios) / min(ratios), rel=1e-12)


@pytest.mark.parametrize("p", [1.3, 2.0])
@pytest.mark.parametrize("seed", range(4))
def test_gradient_matches_finite_differences(p, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    m = MetricMatrix(random_metric(rng, n))
    obj = SmoothedObjective(m, p)
    X = rng.standard_normal((n, 3))
    v = X[obj.iu] - X[obj.ju]
    assert np.min(np.abs(v).max(axis=1)) > 1e-3
    beta = 10.0
    _, _, grad = obj.value_and_grad(X, beta)
    h = 1e-6
    fd = np.zeros_like(X)
    for idx in np.ndindex(*X.shape):
        Xp, Xm = X.copy(), X.copy()
        Xp[idx] += h
        Xm[idx] -= h
        fd[idx] = (obj.value(Xp, beta) - obj.value(Xm, beta)) / (2 * h)
    assert np.linalg.norm(grad - fd) <= 1e-4 * np.linalg.norm(fd)


@pytest.mark.parametrize("beta", [10.0, 160.0, 10240.0])
def test_smoothed_objective_brackets_exact(beta, rng):
    m = diamond_metric(2)
    obj = SmoothedObjective(m, 1.5)
    slack = 2 * math.log(m.n * (m.n - 1) / 2) / beta
    for _ in range(20):
        X = rng.standard_normal((12, 3))
        F, exact = obj.value(X, beta), obj.exact(X)
        assert exact - 1e-12 <= F <= exact + slack + 1e-9


def test_two_points_embed_isometrically():
    for p in [1.0, 1.5, 2.0]:
        _, rep = optimize_embedding(diamond_metric(0), p, 1, OptimizerConfig(restarts=2, iterations=50))
        assert rep.distortion == pytest.approx(1.0, rel=1e-12)


@pytest.fixture(scope="module")
def g1_l2():
    return optimize_embedding(diamond_metric(1), 2.0, 2, OptimizerConfig(seed=7))


def test_g1_square_is_found(g1_l2):
    f, rep = g1_l2
    assert math.sqrt(2) - 1e-6 <= rep.distortion <= 1.4153
    assert f.p == 2.0 and f.coords.shape == (4, 2)
    assert evaluate_distortion(diamond_metric(1), f) == rep


def test_g2_euclidean_regression():
    _, rep = optimize_embedding(diamond_metric(2), 2.0, 11, OptimizerConfig(seed=7))
    assert rep.distortion >= math.sqrt(3) - 1e-6
    assert rep.distortion >= G2_EUCLIDEAN_OPT * (1 - 1e-4)
    # regression baseline: within 1% of the semidefinite optimum
    assert rep.distortion <= G2_EUCLIDEAN_OPT * 1.01


def test_g2_euclidean_sdp():
    cp = pytest.importorskip("cvxpy")
    m = diamond_metric(2)
    n = m.n
    G = cp.Variable((n, n), PSD=True)
    c = cp.Variable()
    cons = []
    for i, j in zip(*m.pairs()):
        q = G[i, i] + G[j, j] - 2 * G[i, j]
        cons += [q >= m[i, j] ** 2, q <= c * m[i, j] ** 2]
    cp.Problem(cp.Minimize(c), cons).solve()
    assert math.sqrt(c.value) == pytest.approx(G2_EUCLIDEAN_OPT, rel=1e-4)


def test_l1_surrogate_reports_exact_l1():
    m = diamond_metric(1)
    f, rep = optimize_embedding(m, 1.0, 2, OptimizerConfig(seed=1, restarts=4))
    assert f.p == 1.0
    assert rep.distortion == pytest.approx(1.0, abs=0.02)
    assert evaluate_distortion(m, f).distortion == rep.distortion


def test_deterministic_and_worker_independent():
    m = diamond_metric(2)
    cfg = OptimizerConfig(seed=5, restarts=4, iterations=300)
    f1, r1 = optimize_embedding(m, 1.5, 3, cfg)
    f2, r2 = optimize_embedding(m, 1.5, 3, cfg)
    f3, r3 = optimize_embedding(m, 1.5, 3, OptimizerConfig(seed=5, restarts=4, iterations=300, workers=4))
    assert np.array_equal(f1.coords, f2.coords) and r1 == r2
    assert np.array_equal(f1.coords, f3.coords) and r1 == r3


def test_best_of_restarts_is_minimum():
    # restart r draws from stream (seed, r) regardless of the restart count
    m = diamond_metric(2)
    _, first = optimize_embedding(m, 2.0, 2, OptimizerConfig(seed=9, restarts=1, iterations=200))
    _, joint = optimize_embedding(m, 2.0, 2, OptimizerConfig(seed=9, restarts=3, iterations=200))
    assert joint.distortion <= first.distortion


@pytest.fixture(scope="module")
def g2_l2_sweep():
    m = diamond_metric(2)
    return {d: optimize_embedding(m, 2.0, d, OptimizerConfig(seed=7))[1].distortion
            for d in [1, 2, 3, 5, 8]}


def test_monotone_in_dimension_l2(g2_l2_sweep):
    ds = sorted(g2_l2_sweep)
    for a, b in zip(ds, ds[1:]):
        assert g2_l2_sweep[b] <= g2_l2_sweep[a] + 0.02


def test_outputs_dominate_certificate(g2_l2_sweep, g1_l2):
    for dist in g2_l2_sweep.values():
        assert dist >= certified_lower_bound(2, 2.0) - 1e-6
    assert g1_l2[1].distortion >= certified_lower_bound(1, 2.0) - 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(step=-1)
    with pytest.raises(ValueError):
        OptimizerConfig(seed=-1)
    with pytest.raises(ValueError):
        OptimizerConfig(beta0=100, beta_max=10)
    cfg = OptimizerConfig()
    assert [cfg.beta_at(i) for i in (0, 399, 400, 1999)] == [10, 10, 20, 160]
    assert OptimizerConfig(iterations=10**5).beta_final == 10240


def test_optimizer_guards():
    m = diamond_metric(1)
    with pytest.raises(ValueError):
        optimize_embedding(m, 2.5, 2)
    with pytest.raises(ValueError):
        optimize_embedding(m, 2.0, 0)
    big = MetricMatrix(np.ones((3001, 3001)) - np.eye(3001))
    with pytest.raises(CapacityError):
        optimize_embedding(big, 2.0, 2)


def test_embedding_csv_and_report(g1_l2):
    f, rep = g1_l2
    lines = f.to_csv().split("\n")
    assert lines[0] == "vertex,c1,c2"
    assert len(lines) == 6 and lines[-1] == ""
    vals = [float(x) for x in lines[1].split(",")[1:]]
    assert vals == f.coords[0].tolist()
    cfg = OptimizerConfig(seed=7)
    data = json.loads(json.dumps(report_json(rep, 2.0, 2, cfg, math.sqrt(2))))
    assert set(data) == {"p", "d", "distortion", "expansion", "contraction",
                         "lower_bound", "seed", "restarts"}
