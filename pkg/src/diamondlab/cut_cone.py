"""Exact minimum-distortion l_1 embeddings through the cut cone.

A finite metric embeds in l_1 iff it is a nonnegative combination of cut
pseudometrics, so the best l_1 distortion of an n-point metric is the value of

    minimize D  s.t.  d(x,y) <= sum_S lam_S delta_S(x,y) <= D d(x,y),  lam >= 0.

Substituting t = 1/D and mu = t*lam turns this into

    maximize t  s.t.  sum_S mu_S delta_S <= d,  t d - sum_S mu_S delta_S <= 0,

whose right-hand side is nonnegative, so the slack basis starts the simplex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificate import Embedding
from .errors import CapacityError
from .metric import MetricMatrix
from .simplex import LPError, simplex_max

MAX_CUT_POINTS = 14
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class Cut:
    """One side S of a bipartition of {0..n-1}; canonical cuts contain 0."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if not (self.mask & 1) or self.mask & ~full or self.mask == full:
            raise ValueError(f"cut {self.mask:#b} is not canonical and proper on {self.n} points")

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def separates(self, x: int, y: int) -> bool:
        return (x in self) != (y in self)

    def metric(self) -> np.ndarray:
        """The cut pseudometric delta_S as an n x n 0/1 matrix."""
        side = (self.mask >> np.arange(self.n)) & 1
        return (side[:, None] != side[None, :]).astype(float)

    @classmethod
    def from_members(cls, members, n: int) -> "Cut":
        return cls(sum(1 << int(i) for i in members), n)


@dataclass(frozen=True)
class CutSolution:
    cuts: tuple[tuple[Cut, float], ...]
    distortion: float
    n: int

    def l1_metric(self) -> np.ndarray:
        """sum_S lam_S delta_S as a dense matrix."""
        out = np.zeros((self.n, self.n))
        for cut, w in self.cuts:
            out += w * cut.metric()
        return out

    def to_json(self) -> dict:
        return {
            "distortion": self.distortion,
            "cuts": [{"members": list(c.members), "weight": w} for c, w in self.cuts],
        }


def enumerate_cuts(n: int) -> list[Cut]:
    """All 2**(n-1) - 1 canonical cuts, ordered by membership bitmap."""
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if n > MAX_CUT_POINTS:
        raise CapacityError(f"cut enumeration limited to n <= {MAX_CUT_POINTS}, got {n}")
    return [Cut(2 * t + 1, n) for t in range(2 ** (n - 1) - 1)]


def separation_matrix(cuts: list[Cut], iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
    """delta[pair, cut] = 1 iff the cut separates the pair."""
    masks = np.array([c.mask for c in cuts], dtype=np.int64)
    side_i = (masks[None, :] >> iu[:, None]) & 1
    side_j = (masks[None, :] >> ju[:, None]) & 1
    return (side_i != side_j).astype(float)


def min_distortion_l1(m: MetricMatrix) -> CutSolution:
    n = m.n
    if n > MAX_CUT_POINTS:
        raise CapacityError(f"exact l1 embedding limited to n <= {MAX_CUT_POINTS}, got {n}")
    cuts = enumerate_cuts(n)
    iu, ju = m.pairs()
    dist = m.d[iu, ju]
    if np.any(dist <= 0):
        raise ValueError("metric must be positive off the diagonal")
    delta = separation_matrix(cuts, iu, ju)
    P, N = delta.shape
    unit = dist.max()
    dist = dist / unit

    A = np.zeros((2 * P, N + 1))
    A[:P, :N] = delta
    A[P:, :N] = -delta
    A[P:, N] = dist
    b = np.concatenate([dist, np.zeros(P)])
    c = np.zeros(N + 1)
    c[N] = 1.0
    res = simplex_max(c, A, b)
    if res.status != "optimal" or not res.value > 0:
        raise LPError(f"cut LP did not reach an optimum (status {res.status})")

    t = res.value
    D = 1.0 / t
    weights = res.x[:N] * (unit / t)
    weights[weights < WEIGHT_FLOOR] = 0.0
    achieved = delta @ weights / (dist * unit)
    if achieved.min() < 1 - 1e-7 or achieved.max() > D * (1 + 1e-7):
        raise LPError("cut LP solution violates its constraints beyond tolerance")
    keep = np.flatnonzero(weights)
    chosen = tuple((cuts[i], float(weights[i])) for i in keep)
    return CutSolution(cuts=chosen, distortion=D, n=n)


def cuts_to_embedding(sol: CutSolution, n: int | None = None) -> Embedding:
    """One l_1 coordinate per retained cut: vertex x gets lam_S * [x in S]."""
    n = sol.n if n is None else n
    if n != sol.n:
        raise ValueError(f"solution is over {sol.n} points, asked for {n}")
    if n >= 2 and not sol.cuts:
        raise ValueError("a solution without cuts cannot separate any points")
    coords = np.zeros((n, len(sol.cuts)))
    for j, (cut, w) in enumerate(sol.cuts):
        coords[list(cut.members), j] = w
    return Embedding(coords, 1.0)


def l1_lp_isomorphism_constant(d: int) -> tuple[float, float]:
    """(p, C) with p = 1 + 1/log2 d and |x|_p <= |x|_1 <= C |x|_p on R^d.

    C = d**(1 - 1/p), which equals 2**(1/p) <= 2 for this choice of p.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    p = 1.0 + 1.0 / math.log2(d)
    return p, 2.0 ** (1.0 / p)
