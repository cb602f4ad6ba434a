"""Experiment runners behind the command-line interface.

Each runner is a plain function returning rows or a dict, so tests can call
them without going through argument parsing.  Runners raise
``InvariantViolation`` when a checked inequality fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certificate import (
    Embedding,
    certified_lower_bound,
    poincare_sides_batch,
)
from .cut_cone import (
    MAX_CUT_POINTS,
    cuts_to_embedding,
    l1_lp_isomorphism_constant,
    min_distortion_l1,
)
from .diamond import build_diamond, num_vertices
from .errors import CapacityError
from .lp_geometry import (
    GAP_RTOL,
    check_p,
    diamond_gap,
    diamond_scale,
    smoothness_gap,
    smoothness_scale,
)
from .metric import shortest_path_metric
from .optimizer import OptimizerConfig, evaluate_distortion, optimize_embedding, report_json

DOMINANCE_TOL = 1e-6
FUZZ_DIMS = (1, 2, 8, 16)
FUZZ_P = (1.0, 1.01, 1.25, 1.5, 1.75, 2.0)
POINCARE_LEVELS = (1, 2, 3)
POINCARE_P = (1.1, 1.5, 2.0)
POINCARE_DIMS = (1, 3, 10)


class InvariantViolation(RuntimeError):
    def __init__(self, message: str, instance: dict | None = None):
        super().__init__(message)
        self.instance = instance


def bound_table(k_max: int, p_list) -> list[tuple[int, float, float]]:
    ps = [check_p(p) for p in p_list]
    if k_max < 0:
        raise ValueError(f"k must be nonnegative, got {k_max}")
    return [(k, p, certified_lower_bound(k, p)) for p in ps for k in range(k_max + 1)]


def tightness(k: int, p: float, d: int, seed: int, restarts: int) -> dict:
    p = check_p(p)
    m = shortest_path_metric(build_diamond(k))
    cfg = OptimizerConfig(seed=seed, restarts=restarts)
    f, rep = optimize_embedding(m, p, d, cfg)
    lower = certified_lower_bound(k, p)
    upper = rep.distortion
    if upper < lower - DOMINANCE_TOL:
        raise InvariantViolation(
            f"optimizer distortion {upper!r} below certified bound {lower!r}",
            {"k": k, "p": p, "coords": f.coords.tolist()},
        )
    return {
        "lower_bound": lower,
        "upper_bound": upper,
        "gap": upper - lower,
        "report": report_json(rep, p, d, cfg, lower),
        "embedding": f,
    }


def chain_lower_bound(k: int, d: int) -> tuple[float, float, float]:
    """(p, C, bound) for G_k in l_1^d via l_1^d -> l_p^d with constant C.

    For d >= 2: p = 1 + 1/log2 d and C = 2**(1/p).  On the line every l_p
    coincides, so d = 1 uses p = 2 with C = 1.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d == 1:
        p, C = 2.0, 1.0
    else:
        p, C = l1_lp_isomorphism_constant(d)
    return p, C, certified_lower_bound(k, p) / C


@dataclass
class SweepResult:
    rows: list[dict]
    c1: float | None
    notes: list[str] = field(default_factory=list)
    embeddings: dict[int, Embedding] = field(default_factory=dict)

    @property
    def validated(self) -> bool:
        return self.c1 is not None


def dim_sweep(k: int, d_list, seed: int, restarts: int) -> SweepResult:
    g = build_diamond(k)
    m = shortest_path_metric(g)
    c1 = min_distortion_l1(m).distortion if g.num_vertices <= MAX_CUT_POINTS else None
    cfg = OptimizerConfig(seed=seed, restarts=restarts)
    rows, notes, embeddings = [], [], {}
    for d in d_list:
        f, rep = optimize_embedding(m, 1.0, d, cfg)
        embeddings[d] = f
        _, _, chain = chain_lower_bound(k, d)
        best = rep.distortion
        if best < certified_lower_bound(k, 1.0) - DOMINANCE_TOL:
            raise InvariantViolation(f"distortion {best!r} below 1 at d={d}")
        if c1 is not None and best < chain / c1 - DOMINANCE_TOL:
            raise InvariantViolation(
                f"distortion {best!r} at d={d} violates chain bound {chain / c1!r}"
            )
        rows.append({"k": k, "d": d, "p": 1.0, "best_distortion": best,
                     "lower_bound_chain": chain, "seed": seed})
    if c1 is None:
        notes.append(f"chain bound unvalidated for k={k}: G_k has more than "
                     f"{MAX_CUT_POINTS} vertices, no exact l1 constant")
    return SweepResult(rows=rows, c1=c1, notes=notes, embeddings=embeddings)


def l1_exact(k: int) -> dict:
    if num_vertices(k) > MAX_CUT_POINTS:
        raise CapacityError(
            f"G_{k} has {num_vertices(k)} vertices; exact l1 needs <= {MAX_CUT_POINTS}"
        )
    m = shortest_path_metric(build_diamond(k))
    sol = min_distortion_l1(m)
    f = cuts_to_embedding(sol)
    measured = evaluate_distortion(m, f).distortion
    if abs(measured - sol.distortion) > 1e-6 * sol.distortion:
        raise InvariantViolation(
            f"cut embedding distortion {measured!r} differs from LP value {sol.distortion!r}"
        )
    out = sol.to_json()
    out["embedding_distortion"] = measured
    out["embedding"] = f.coords.tolist()
    return out


# ---------------------------------------------------------------- fuzzing

def _random_vectors(rng: np.random.Generator, count: int, trials: int, dim: int) -> np.ndarray:
    """Gaussian vectors with log-uniform scales and some exact zeros."""
    x = rng.standard_normal((count, trials, dim))
    x *= 10.0 ** rng.uniform(-3, 3, size=(1, trials, 1))
    x *= rng.random((count, trials, dim)) > 0.2
    return x


@dataclass
class FuzzSummary:
    lemma1_min_gap: float = math.inf
    smoothness_min_gap: float = math.inf
    lemma2_min_slack: float = math.inf
    p2_smoothness_max_abs: float = 0.0
    worst: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lemma1_min_gap": self.lemma1_min_gap,
            "smoothness_min_gap": self.smoothness_min_gap,
            "lemma2_min_slack": self.lemma2_min_slack,
        }

    def violations(self, rtol: float = GAP_RTOL) -> list[dict]:
        return [w for name, w in self.worst.items()
                if getattr(self, name) < -rtol]


def fuzz_inequalities(
    trials: int,
    seed: int,
    p_list=None,
    poincare_p=None,
    dims=FUZZ_DIMS,
    poincare_levels=POINCARE_LEVELS,
    poincare_dims=POINCARE_DIMS,
) -> FuzzSummary:
    """Random search for violations of the two-point, four-point and diamond inequalities.

    Every reported minimum is normalized by its instance's scale, so the
    pass criterion is simply ``value >= -1e-9``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ps = [check_p(p) for p in (FUZZ_P if p_list is None else p_list)]
    ps2 = [check_p(p) for p in (POINCARE_P if poincare_p is None else poincare_p)]
    out = FuzzSummary()
    stream = 0

    def note(name: str, values: np.ndarray, make_instance) -> None:
        i = int(np.argmin(values))
        if values[i] < getattr(out, name):
            setattr(out, name, float(values[i]))
            out.worst[name] = make_instance(i)

    for dim in dims:
        for p in ps:
            rng = np.random.default_rng([seed, stream])
            stream += 1
            a, b = _random_vectors(rng, 2, trials, dim)
            scale = smoothness_scale(a, b, p)
            rel = np.where(scale > 0, smoothness_gap(a, b, p) / np.where(scale > 0, scale, 1), 0.0)
            note("smoothness_min_gap", rel, lambda i: {
                "kind": "smoothness", "p": p, "a": a[i].tolist(), "b": b[i].tolist()})
            if p == 2.0:
                out.p2_smoothness_max_abs = max(out.p2_smoothness_max_abs, float(np.abs(rel).max()))

            x, y, z, w = _random_vectors(rng, 4, trials, dim)
            scale = diamond_scale(x, y, z, w, p)
            gap = diamond_gap(x, y, z, w, p)
            rel = np.where(scale > 0, gap / np.where(scale > 0, scale, 1), 0.0)
            note("lemma1_min_gap", rel, lambda i: {
                "kind": "lemma1", "p": p, "x": x[i].tolist(), "y": y[i].tolist(),
                "z": z[i].tolist(), "w": w[i].tolist()})

    for k in poincare_levels:
        g = build_diamond(k)
        for p in ps2:
            for dim in poincare_dims:
                rng = np.random.default_rng([seed, stream])
                stream += 1
                coords = rng.standard_normal((trials, g.num_vertices, dim))
                lhs, rhs = poincare_sides_batch(g, coords, p)
                rel = (rhs - lhs) / rhs
                note("lemma2_min_slack", rel, lambda i: {
                    "kind": "lemma2", "k": k, "p": p, "coords": coords[i].tolist()})
    return out


def random_embeddings(k: int, p: float, dim: int, count: int, seed: int) -> list[Embedding]:
    """``count`` i.i.d. standard Gaussian embeddings of G_k into R^dim."""
    g = build_diamond(k)
    rng = np.random.default_rng([seed, k, int(round(p * 1000)), dim])
    return [Embedding(rng.standard_normal((g.num_vertices, dim)), p) for _ in range(count)]
