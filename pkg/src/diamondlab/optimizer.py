"""Low-distortion embeddings of finite metrics into l_p^d by smoothed descent.

The exact log-distortion of f is  max_xy r_xy - min_xy r_xy  with
r_xy = log(|f(x)-f(y)|_p / d(x,y)).  Descent minimizes the log-sum-exp
surrogate

    F_beta = LSE_beta(r) + LSE_beta(-r),   LSE_beta(v) = log(sum exp(beta v)) / beta,

which is scale invariant and exceeds the exact value by at most
2 ln(#pairs) / beta.  beta follows a doubling schedule; every restart keeps
its best iterate under the exact measure.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import sparse

from .certificate import Embedding
from .errors import CapacityError
from .lp_geometry import check_p, lp_norm
from .metric import MetricMatrix

MAX_POINTS = 3000


@dataclass(frozen=True)
class DistortionReport:
    expansion: float
    contraction: float
    distortion: float
    witness_expansion: tuple[int, int]
    witness_contraction: tuple[int, int]

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.distortion)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    iterations: int = 2000
    step: float = 0.05
    beta0: float = 10.0
    beta_every: int = 400
    beta_max: float = 10240.0
    seed: int = 0
    epsilon_norm: float = 1e-12
    step_floor: float = 1e-7
    step_growth: float = 1.1
    p1_surrogate: float = 1.001
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("restarts", "iterations", "beta_every", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("step", "beta0", "beta_max", "epsilon_norm", "step_floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.step_growth < 1:
            raise ValueError("step_growth must be >= 1")
        if self.beta_max < self.beta0:
            raise ValueError("beta_max must be >= beta0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def beta_at(self, iteration: int) -> float:
        return min(self.beta0 * 2.0 ** (iteration // self.beta_every), self.beta_max)

    @property
    def beta_final(self) -> float:
        return self.beta_at(self.iterations - 1)

    def to_json(self) -> dict:
        return asdict(self)


def evaluate_distortion(m: MetricMatrix, f: Embedding) -> DistortionReport:
    """Exact expansion, contraction and distortion of f over all pairs.

    Witnesses are the lexicographically smallest pairs attaining the maxima.
    Coincident images of distinct points give infinite contraction, with the
    first such pair as witness.
    """
    if m.n < 2:
        raise ValueError("distortion needs at least two points")
    if f.vertex_count != m.n:
        raise ValueError(f"embedding covers {f.vertex_count} points, metric has {m.n}")
    iu, ju = m.pairs()
    img = lp_norm(f.coords[iu] - f.coords[ju], f.p)
    ratio = img / m.d[iu, ju]
    e = int(np.argmax(ratio))
    c = int(np.argmin(ratio))
    expansion = float(ratio[e])
    if ratio[c] <= 0:
        contraction = math.inf
        distortion = math.inf
    else:
        contraction = 1.0 / float(ratio[c])
        distortion = expansion * contraction
    return DistortionReport(
        expansion=expansion,
        contraction=contraction,
        distortion=distortion,
        witness_expansion=(int(iu[e]), int(ju[e])),
        witness_contraction=(int(iu[c]), int(ju[c])),
    )


def _lse(v: np.ndarray) -> float:
    top = v.max()
    return float(top + np.log(np.exp(v - top).sum()))


def _row_norms(v: np.ndarray, p: float) -> np.ndarray:
    # lean l_p norm for iterates that stay normalized to unit mean scale
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", v, v))
    return (np.abs(v) ** p).sum(axis=1) ** (1.0 / p)


class SmoothedObjective:
    """F_beta and its gradient for one metric and exponent."""

    def __init__(self, m: MetricMatrix, p: float, epsilon_norm: float = 1e-12):
        self.n = m.n
        self.p = p
        self.eps = epsilon_norm
        self.iu, self.ju = m.pairs()
        dist = m.d[self.iu, self.ju]
        # distortion is scale free; normalizing keeps step sizes meaningful
        self.scale = float(np.mean(dist))
        self.log_d = np.log(dist / self.scale)
        npairs = len(self.iu)
        rows = np.concatenate([self.iu, self.ju])
        cols = np.concatenate([np.arange(npairs), np.arange(npairs)])
        vals = np.concatenate([np.ones(npairs), -np.ones(npairs)])
        self.incidence = sparse.csr_matrix((vals, (rows, cols)), shape=(self.n, npairs))

    @property
    def num_pairs(self) -> int:
        return len(self.iu)

    def _diffs(self, X: np.ndarray):
        v = X[self.iu] - X[self.ju]
        return v, _row_norms(v, self.p)

    def log_ratios(self, X: np.ndarray) -> np.ndarray:
        _, norms = self._diffs(X)
        return np.log(np.maximum(norms, self.eps)) - self.log_d

    def exact(self, X: np.ndarray) -> float:
        r = self.log_ratios(X)
        return float(r.max() - r.min())

    def value(self, X: np.ndarray, beta: float) -> float:
        r = self.log_ratios(X)
        return (_lse(beta * r) + _lse(-beta * r)) / beta

    def value_and_grad(self, X: np.ndarray, beta: float):
        """Returns (F_beta, exact log-distortion, dF/dX)."""
        v, norms = self._diffs(X)
        r = np.log(np.maximum(norms, self.eps)) - self.log_d
        lse_hi = _lse(beta * r)
        lse_lo = _lse(-beta * r)
        F = (lse_hi + lse_lo) / beta
        w = np.exp(beta * r - lse_hi) - np.exp(-beta * r - lse_lo)
        # d r / d v = sign(v) |v|^(p-1) / |v|_p^p, zeroed for tiny differences
        live = norms >= self.eps
        coef = np.zeros_like(norms)
        coef[live] = w[live] / norms[live] ** self.p
        if self.p == 2.0:
            dv = v * coef[:, None]
        else:
            dv = np.sign(v) * np.abs(v) ** (self.p - 1.0) * coef[:, None]
        grad = np.asarray(self.incidence @ dv)
        return F, float(r.max() - r.min()), grad


def _normalize(X: np.ndarray, obj: SmoothedObjective) -> np.ndarray:
    X = X - X.mean(axis=0)
    _, norms = obj._diffs(X)
    s = float(np.mean(norms))
    return X / s if s > 0 else X


def _run_restart(
    obj: SmoothedObjective,
    d: int,
    cfg: OptimizerConfig,
    restart: int,
    track: SmoothedObjective | None = None,
):
    """One descent run; ``track`` scores iterates when the reported p differs."""
    score = (lambda Y, e: track.exact(Y)) if track is not None else (lambda Y, e: e)
    rng = np.random.default_rng([cfg.seed, restart])
    X = _normalize(rng.standard_normal((obj.n, d)), obj)
    step = cfg.step
    beta = cfg.beta_at(0)
    F, exact, grad = obj.value_and_grad(X, beta)
    best_X, best_exact = X, score(X, exact)
    for it in range(1, cfg.iterations):
        new_beta = cfg.beta_at(it)
        if new_beta != beta:
            beta = new_beta
            F, exact, grad = obj.value_and_grad(X, beta)
        cand = _normalize(X - step * grad, obj)
        F_c, exact_c, grad_c = obj.value_and_grad(cand, beta)
        if F_c > F:
            step = max(step * 0.5, cfg.step_floor)
            continue
        step = min(step * cfg.step_growth, cfg.step)
        X, F, exact, grad = cand, F_c, exact_c, grad_c
        sc = score(X, exact)
        if sc < best_exact:
            best_X, best_exact = X, sc
    return best_exact, best_X


def optimize_embedding(
    m: MetricMatrix, p: float, d: int, cfg: OptimizerConfig | None = None
) -> tuple[Embedding, DistortionReport]:
    """Best embedding of m into l_p^d found over ``cfg.restarts`` restarts.

    At p = 1 the descent runs at ``cfg.p1_surrogate`` and the returned report
    is the exact l_1 distortion of the best iterate.  Restart r draws from the
    seed sequence (cfg.seed, r), so results do not depend on ``cfg.workers``.
    """
    cfg = cfg or OptimizerConfig()
    p = check_p(p)
    if m.n > MAX_POINTS:
        raise CapacityError(f"optimizer limited to {MAX_POINTS} points, got {m.n}")
    if m.n < 2:
        raise ValueError("need at least two points")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")

    p_descent = cfg.p1_surrogate if p == 1.0 else p
    obj = SmoothedObjective(m, p_descent, cfg.epsilon_norm)
    track = SmoothedObjective(m, p, cfg.epsilon_norm) if p_descent != p else None

    def run(r: int):
        _, X = _run_restart(obj, d, cfg, r, track)
        f = Embedding(X * obj.scale, p)
        return evaluate_distortion(m, f).distortion, r, f

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, range(cfg.restarts)))
    else:
        results = [run(r) for r in range(cfg.restarts)]
    _, _, best = min(results, key=lambda t: (t[0], t[1]))
    return best, evaluate_distortion(m, best)


def report_json(
    report: DistortionReport, p: float, d: int, cfg: OptimizerConfig, lower_bound: float
) -> dict:
    return {
        "p": p,
        "d": d,
        "distortion": report.distortion,
        "expansion": report.expansion,
        "contraction": report.contraction,
        "lower_bound": lower_bound,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
    }
