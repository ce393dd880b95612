"""One-dimensional maximisation helpers shared by the norm and gamma code."""

from __future__ import annotations

import numpy as np

_INVPHI = (5.0**0.5 - 1.0) / 2.0


def golden_max(f, lo, hi, tol: float = 1e-10, max_iter: int = 200):
    """Golden-section maximisation of a vectorised ``f`` on ``[lo, hi]``.

    ``lo`` and ``hi`` may be arrays; every lane runs the same number of steps,
    enough to bring the widest bracket below ``tol``.  Returns ``(x, fx)`` for
    the best point seen, endpoints included.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    steps = 0 if width <= tol else min(max_iter, int(np.ceil(np.log(tol / width) / np.log(_INVPHI))))
    best_x = lo.copy()
    best_f = np.asarray(f(lo), dtype=float)
    f_hi = np.asarray(f(hi), dtype=float)
    take = f_hi > best_f
    best_x = np.where(take, hi, best_x)
    best_f = np.where(take, f_hi, best_f)
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = np.asarray(f(c), dtype=float)
    fd = np.asarray(f(d), dtype=float)
    for _ in range(steps):
        left = fc >= fd
        # keep [a, d] where f(c) wins, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        c_prev, d_prev, fc_prev, fd_prev = c, d, fc, fd
        c = np.where(left, new_c, d_prev)
        d = np.where(left, c_prev, new_d)
        probe = np.where(left, c, d)
        fp = np.asarray(f(probe), dtype=float)
        fc = np.where(left, fp, fd_prev)
        fd = np.where(left, fc_prev, fp)
    for x, fx in ((c, fc), (d, fd)):
        take = fx > best_f
        best_x = np.where(take, x, best_x)
        best_f = np.where(take, fx, best_f)
    return best_x, best_f


def golden_max_scalar(f, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Plain-float golden-section maximisation; returns the best point seen."""
    a, b = float(lo), float(hi)
    best_x, best_f = a, f(a)
    fb = f(b)
    if fb > best_f:
        best_x, best_f = b, fb
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def grid_then_golden(
    f, lo: float, hi: float, points: int, tol: float = 1e-10, periodic: bool = False
) -> tuple[float, float]:
    """Scan ``points`` equispaced samples, then refine the best cell by golden section.

    With ``periodic`` the interval is one period of ``f``: the grid omits the
    right endpoint and the refinement window may wrap past either end.
    """
    xs = np.linspace(lo, hi, points, endpoint=not periodic)
    vals = np.asarray(f(xs), dtype=float)
    k = int(np.argmax(vals))
    if periodic:
        h = xs[1] - xs[0]
        a, b = xs[k] - h, xs[k] + h
    else:
        a = xs[max(k - 1, 0)]
        b = xs[min(k + 1, points - 1)]
    x, fx = golden_max_scalar(lambda t: float(f(t)), a, b, tol)
    if fx >= vals[k]:
        return x, fx
    return float(xs[k]), float(vals[k])


def parabolic_peak(left: np.ndarray, mid: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Vertex height of the parabola through three equispaced samples with ``mid`` largest."""
    denom = left - 2.0 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        bump = np.where(denom < 0, (left - right) ** 2 / (-8.0 * denom), 0.0)
    return mid + np.maximum(bump, 0.0)
