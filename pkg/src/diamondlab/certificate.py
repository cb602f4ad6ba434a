"""Poincare-type certificate for embeddings of G_k into l_p, 1 <= p <= 2.

For any map f of G_k into l_p,

    |f(s)-f(t)|^2 + (p-1) * sum_{i=1..k} sum_{(x,y) in A_i} |f(x)-f(y)|^2
        <= sum_{(x,y) in E(G_k)} |f(x)-f(y)|^2.

With |A_i| = 4**(i-1), anti-edges of level i at distance 2**(1-i), and 4**k
edges of length 2**-k, a non-expansive map with contraction D gives
(1 + (p-1)k) / D**2 <= 1, i.e. D >= sqrt(1 + (p-1)k).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .diamond import DiamondGraph
from .lp_geometry import check_p, lp_norm


@dataclass(frozen=True)
class Embedding:
    """Coordinates of vertices 0..n-1 in l_p^d, one row per vertex."""

    coords: np.ndarray
    p: float

    def __post_init__(self) -> None:
        c = np.array(self.coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError(f"coordinates must have shape (n, d), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        if self.p < 1:
            raise ValueError(f"exponent p must be >= 1, got {self.p}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "p", float(self.p))

    @property
    def vertex_count(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def scaled(self, c: float) -> "Embedding":
        return Embedding(self.coords * c, self.p)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("vertex," + ",".join(f"c{j + 1}" for j in range(self.dimension)) + "\n")
        for i, row in enumerate(self.coords):
            buf.write(f"{i}," + ",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class Certificate:
    lhs: float
    rhs: float
    k: int
    p: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def holds(self, rtol: float = 1e-9) -> bool:
        return self.slack >= -rtol * self.rhs

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "p": self.p,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "lower_bound": certified_lower_bound(self.k, self.p),
        }


def _index_arrays(g: DiamondGraph):
    """(anti-edge endpoints, edge endpoints) as int arrays, level-major."""
    A = g.all_anti_edges()
    a = np.fromiter((ae.a for ae in A), dtype=np.int64, count=len(A))
    b = np.fromiter((ae.b for ae in A), dtype=np.int64, count=len(A))
    E = g.edges
    u = np.fromiter((e.u for e in E), dtype=np.int64, count=len(E))
    v = np.fromiter((e.v for e in E), dtype=np.int64, count=len(E))
    return (a, b), (u, v)


def _ordered_sum(terms: np.ndarray) -> np.ndarray:
    # strictly left-to-right, independent of array layout
    return np.cumsum(terms, axis=1)[:, -1]


def poincare_sides_batch(g: DiamondGraph, coords: np.ndarray, p: float):
    """Both sides for a stack of embeddings, coords of shape (trials, n, d).

    Returns (lhs, rhs) arrays of shape (trials,).
    """
    p = check_p(p)
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 3 or coords.shape[1] != g.num_vertices:
        raise ValueError(
            f"expected coordinates of shape (trials, {g.num_vertices}, d), got {coords.shape}"
        )
    (a, b), (u, v) = _index_arrays(g)
    st = lp_norm(coords[:, g.s] - coords[:, g.t], p) ** 2
    anti = _ordered_sum(lp_norm(coords[:, a] - coords[:, b], p) ** 2) if len(a) else 0.0
    rhs = _ordered_sum(lp_norm(coords[:, u] - coords[:, v], p) ** 2)
    return st + (p - 1.0) * anti, rhs


def poincare_sides(g: DiamondGraph, f: Embedding, p: float | None = None) -> Certificate:
    """Evaluate both sides of the diamond Poincare inequality for f.

    Terms are accumulated level-major in canonical edge order, so repeated
    calls are bit-identical.  ``p`` defaults to the embedding's exponent.
    """
    p = check_p(f.p if p is None else p)
    if f.vertex_count != g.num_vertices:
        raise ValueError(
            f"embedding covers {f.vertex_count} vertices, graph has {g.num_vertices}"
        )
    lhs, rhs = poincare_sides_batch(g, f.coords[None], p)
    return Certificate(lhs=float(lhs[0]), rhs=float(rhs[0]), k=g.level, p=p)


def certified_lower_bound(k: int, p: float) -> float:
    """sqrt(1 + (p-1) k): no embedding of G_k into l_p has smaller distortion."""
    p = check_p(p)
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    return math.sqrt(1.0 + (p - 1.0) * k)


def corollary_dimension_bound(k: int, D: float, c1: float = 1.0) -> float:
    """Smallest dimension d not excluded for embedding G_k into l_1^d with distortion D.

    Chain: an l_1 image of G_k with distortion c1 * D, moved into l_p^d with
    p = 1 + 1/log2(d) at cost 2**(1/p) <= 2, must still satisfy the lower
    bound, so sqrt(1 + k/log2 d) <= 2 c1 D, i.e. d >= 2**(k / ((2 c1 D)**2 - 1)).
    Returns ``math.inf`` when (2 c1 D)**2 <= 1, where no finite dimension can
    satisfy the chain; unreachable for D >= 1 and c1 >= 1.
    """
    if D < 1:
        raise ValueError(f"distortion D must be >= 1, got {D}")
    if c1 < 1:
        raise ValueError(f"embedding constant c1 must be >= 1, got {c1}")
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    s2d2 = (2.0 * c1 * D) ** 2
    if s2d2 <= 1.0:
        return math.inf
    return 2.0 ** (k / (s2d2 - 1.0))
