"""Shortest-path metric of a diamond graph and metric-axiom checks."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .diamond import DiamondGraph, edge_length
from .errors import CapacityError

MAX_METRIC_LEVEL = 6
METRIC_TOL = 1e-12


@dataclass(frozen=True)
class MetricMatrix:
    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"metric must be a square matrix, got shape {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Row/column indices of the unordered pairs i < j, lexicographic."""
        return np.triu_indices(self.n, k=1)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self.d[ij])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("i,j,d\n")
        iu, ju = self.pairs()
        for i, j in zip(iu.tolist(), ju.tolist()):
            buf.write(f"{i},{j},{self.d[i, j]:.17g}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class Violation:
    kind: str  # "reflexivity" | "symmetry" | "positivity" | "triangle"
    indices: tuple[int, ...]
    magnitude: float


def shortest_path_metric(g: DiamondGraph) -> MetricMatrix:
    """All-pairs distances of G_k with every edge of length 2**-k.

    Hop counts come from breadth-first search on the unweighted graph and are
    scaled once, so every entry is an exact multiple of 2**-k.
    """
    if g.level > MAX_METRIC_LEVEL:
        raise CapacityError(
            f"dense metric limited to k <= {MAX_METRIC_LEVEL}, got k = {g.level}"
        )
    n = g.num_vertices
    u = np.array([e.u for e in g.edges], dtype=np.int64)
    v = np.array([e.v for e in g.edges], dtype=np.int64)
    adj = coo_matrix((np.ones(len(u)), (u, v)), shape=(n, n)).tocsr()
    hops = shortest_path(adj, method="D", directed=False, unweighted=True)
    return MetricMatrix(hops * edge_length(g.level))


def verify_metric(m: MetricMatrix, tol: float = METRIC_TOL) -> list[Violation]:
    """List every violated metric axiom; an empty list means m is a metric.

    Triangle violations are reported once per unordered pair {i, j} and
    intermediate vertex k distinct from both.  Cost is O(n**3).
    """
    d = m.d
    n = m.n
    out: list[Violation] = []

    for i in np.flatnonzero(np.abs(np.diag(d)) > tol).tolist():
        out.append(Violation("reflexivity", (i,), float(abs(d[i, i]))))

    iu, ju = m.pairs()
    asym = np.abs(d[iu, ju] - d[ju, iu])
    for t in np.flatnonzero(asym > tol).tolist():
        out.append(Violation("symmetry", (int(iu[t]), int(ju[t])), float(asym[t])))

    for t in np.flatnonzero(~(d[iu, ju] > 0) | ~(d[ju, iu] > 0)).tolist():
        i, j = int(iu[t]), int(ju[t])
        out.append(Violation("positivity", (i, j), float(min(d[i, j], d[j, i]))))

    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for k in range(n):
        excess = d - (d[:, k][:, None] + d[k, :][None, :])
        mask = upper & (excess > tol)
        mask[k, :] = False
        mask[:, k] = False
        for i, j in zip(*np.nonzero(mask)):
            out.append(Violation("triangle", (int(i), int(j), k), float(excess[i, j])))
    return out
