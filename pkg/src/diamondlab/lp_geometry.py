"""l_p norm kernels and the two-point and four-point inequalities as gap functions.

All gap functions return "right side minus left side", so a nonnegative value
means the inequality holds.  They accept a trailing coordinate axis and
broadcast over leading axes, which is how the fuzzers evaluate thousands of
instances at once.
"""
from __future__ import annotations

import numpy as np

GAP_RTOL = 1e-9


def check_p(p: float, *, strict: bool = False) -> float:
    """Validate an exponent in [1, 2] (or (1, 2] when strict)."""
    p = float(p)
    lo_ok = p > 1.0 if strict else p >= 1.0
    if not (lo_ok and p <= 2.0):
        interval = "(1, 2]" if strict else "[1, 2]"
        raise ValueError(f"exponent p must lie in {interval}, got {p}")
    return p


def abs_pow(x: np.ndarray, p: float) -> np.ndarray:
    """|x|**p as exp(p * ln|x|), with 0 mapped to 0."""
    ax = np.abs(x)
    out = np.zeros_like(ax, dtype=float)
    nz = ax > 0
    out[nz] = np.exp(p * np.log(ax[nz]))
    return out


def lp_norm(v, p: float) -> np.ndarray | float:
    """(sum_i |v_i|**p)**(1/p) along the last axis.

    Entries are divided by the largest magnitude first, so the result neither
    overflows nor underflows for extreme scales.
    """
    v = np.asarray(v, dtype=float)
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if v.ndim == 0:
        v = v[None]
    scale = np.max(np.abs(v), axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    inner = np.sum(abs_pow(v / safe, p), axis=-1)
    out = safe[..., 0] * inner ** (1.0 / p)
    out = np.where(scale[..., 0] > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def _sq(v, p: float):
    return lp_norm(v, p) ** 2


def _check_same_shape(*vs: np.ndarray) -> None:
    shapes = {v.shape[-1] if v.ndim else 1 for v in vs}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def smoothness_scale(a, b, p: float):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return 2.0 * (_sq(a, p) + _sq(b, p))


def smoothness_gap(a, b, p: float):
    """2(|a|^2 + |b|^2) - |a+b|^2 - (p-1)|a-b|^2, all norms l_p.

    Nonnegative for 1 <= p <= 2 (uniform smoothness of l_p); identically zero
    at p = 2 by the parallelogram law.
    """
    p = check_p(p)
    a, b = np.asarray(a, float), np.asarray(b, float)
    _check_same_shape(a, b)
    return smoothness_scale(a, b, p) - _sq(a + b, p) - (p - 1.0) * _sq(a - b, p)


def diamond_scale(x, y, z, w, p: float):
    """Sum of the squared side lengths of the quadrilateral x, y, w, z."""
    x, y, z, w = (np.asarray(t, float) for t in (x, y, z, w))
    return _sq(x - y, p) + _sq(y - w, p) + _sq(w - z, p) + _sq(z - x, p)


def diamond_gap(x, y, z, w, p: float):
    """Sides minus diagonals for the quadrilateral x, y, w, z.

    Returns  |x-y|^2 + |y-w|^2 + |w-z|^2 + |z-x|^2 - |y-z|^2 - (p-1)|x-w|^2.
    The diagonal y-z enters with weight 1 and x-w with weight p-1; at p = 2
    this is the short diagonals inequality.
    """
    p = check_p(p)
    x, y, z, w = (np.asarray(t, float) for t in (x, y, z, w))
    _check_same_shape(x, y, z, w)
    return diamond_scale(x, y, z, w, p) - _sq(y - z, p) - (p - 1.0) * _sq(x - w, p)
