"""Dense tableau simplex with Bland's anti-cycling rule.

Solves  maximize c.x  subject to  A x <= b,  x >= 0  with b >= 0, so the
slack basis is feasible from the start and no phase one is needed.  Sizes in
this package stay below a few hundred rows and ~10^4 columns, where a dense
numpy tableau is fast enough.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    value: float
    status: str  # "optimal" | "unbounded" | "iteration_limit"
    pivots: int
    basis: tuple[int, ...]


def simplex_max(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    tol: float = 1e-9,
    pivot_tol: float = 1e-7,
    max_pivots: int = 200_000,
) -> SimplexResult:
    """Bland's rule: enter the lowest-index improving column, leave by the
    minimum ratio with ties broken by the lowest basic index.

    ``tol`` decides optimality; ``pivot_tol`` rejects pivot elements that are
    elimination residue.  Data should be scaled to order one.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")

    # rows 0..m-1: [A | I | b];  last row: reduced costs and -objective
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = c
    basis = np.arange(n, n + m)

    pivots = 0
    status = "optimal"
    while True:
        enter = np.flatnonzero(T[m, :-1] > tol)
        if enter.size == 0:
            break
        if pivots >= max_pivots:
            status = "iteration_limit"
            break
        j = int(enter[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > pivot_tol)
        if rows.size == 0:
            status = "unbounded"
            break
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        r = int(ties[np.argmin(basis[ties])])

        T[r] /= T[r, j]
        factor = T[:, j].copy()
        factor[r] = 0.0
        T -= np.outer(factor, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        basis[r] = j
        pivots += 1

    x_full = np.zeros(n + m)
    if status == "optimal":
        # re-solve the basic system once for accuracy lost over many pivots
        full = np.hstack([A, np.eye(m)])
        xb = T[:m, -1]
        try:
            refined = np.linalg.solve(full[:, basis], b)
            if np.abs(full[:, basis] @ refined - b).max() <= tol * max(1.0, np.abs(b).max()):
                xb = refined
        except np.linalg.LinAlgError:
            pass
        x_full[basis] = np.maximum(xb, 0.0)
    else:
        x_full[basis] = T[:m, -1]
    x = x_full[:n]
    return SimplexResult(
        x=x,
        value=float(c @ x),
        status=status,
        pivots=pivots,
        basis=tuple(int(i) for i in basis),
    )
