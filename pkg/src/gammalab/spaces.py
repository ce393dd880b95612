"""Norms and dual norms of the unit balls under study.

Three families are supported: the planar balls ``{|z1|^p + |z2|^q <= 1}``,
and the sup and sum norms on n coordinates.  All of them are invariant under
coordinate-wise phase rotations, so every norm is computed from the moduli of
the coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._search import golden_max, golden_max_scalar
from .linalg import MAX_DIM, FieldTag

P_MAX = 64.0
GAUGE_RTOL = 1e-12
DUAL_GRID = 256
DUAL_TOL = 1e-10
CENSUS_TOL = 1e-9


class Kind(str, enum.Enum):
    PQ = "pq"
    LINF = "linf"
    L1 = "l1"


class Census(str, enum.Enum):
    FOUR_VERTICES = "four_vertices"
    MORE_THAN_FOUR = "more_than_four"


@dataclass(frozen=True)
class SpaceSpec:
    kind: Kind
    field: FieldTag = FieldTag.REAL
    p: float = 0.0
    q: float = 0.0
    n: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "field", FieldTag.coerce(self.field))
        if self.kind is Kind.PQ:
            for name, val in (("p", self.p), ("q", self.q)):
                if not (math.isfinite(val) and 1.0 <= val <= P_MAX):
                    raise ValueError(f"{name} must be >= 1 and <= {P_MAX:g}, got {val!r}")
            object.__setattr__(self, "p", float(self.p))
            object.__setattr__(self, "q", float(self.q))
            object.__setattr__(self, "n", 2)
        else:
            if not 2 <= self.n <= MAX_DIM:
                raise ValueError(f"n must be between 2 and {MAX_DIM}, got {self.n}")
            object.__setattr__(self, "p", 0.0)
            object.__setattr__(self, "q", 0.0)

    @classmethod
    def pq(cls, p: float, q: float, field: FieldTag | str = FieldTag.REAL) -> "SpaceSpec":
        return cls(Kind.PQ, field, p, q)

    @classmethod
    def linf(cls, n: int, field: FieldTag | str = FieldTag.REAL) -> "SpaceSpec":
        return cls(Kind.LINF, field, n=n)

    @classmethod
    def l1(cls, n: int, field: FieldTag | str = FieldTag.REAL) -> "SpaceSpec":
        return cls(Kind.L1, field, n=n)

    @property
    def dim(self) -> int:
        return self.n

    def with_field(self, field: FieldTag | str) -> "SpaceSpec":
        return SpaceSpec(self.kind, field, self.p, self.q, self.n)

    def label(self) -> str:
        if self.kind is Kind.PQ:
            return f"pq:{self.p:g},{self.q:g}"
        return f"{self.kind.value}:{self.n}"

    def __str__(self) -> str:
        return f"{self.label()} ({self.field.value})"


def parse_space(text: str, field: FieldTag | str = FieldTag.REAL) -> SpaceSpec:
    """Parse ``"pq:P,Q"``, ``"linf:N"`` or ``"l1:N"``."""
    kind, sep, args = text.strip().partition(":")
    kind = kind.lower()
    if not sep:
        raise ValueError(f"bad space {text!r}: expected 'pq:P,Q', 'linf:N' or 'l1:N'")
    if kind == "pq":
        parts = args.split(",")
        if len(parts) != 2:
            raise ValueError(f"bad space {text!r}: pq takes two exponents 'pq:P,Q'")
        vals = []
        for name, tok in zip("pq", parts):
            try:
                vals.append(float(tok))
            except ValueError:
                raise ValueError(f"bad exponent {tok!r} in {text!r}") from None
            if not (math.isfinite(vals[-1]) and vals[-1] >= 1.0):
                raise ValueError(f"{name} must be >= 1 (got {tok!r})")
            if vals[-1] > P_MAX:
                raise ValueError(f"{name} must be <= {P_MAX:g} (got {tok!r})")
        return SpaceSpec.pq(vals[0], vals[1], field)
    if kind in ("linf", "l1"):
        try:
            n = int(args)
        except ValueError:
            raise ValueError(f"bad dimension {args!r} in {text!r}") from None
        if not 2 <= n <= MAX_DIM:
            raise ValueError(f"dimension must be between 2 and {MAX_DIM} (got {args!r})")
        return SpaceSpec(Kind(kind), field, n=n)
    raise ValueError(f"unknown space kind {kind!r} in {text!r}")


def _as_vector(space: SpaceSpec, v) -> np.ndarray:
    arr = np.asarray(v)
    if arr.shape != (space.dim,):
        raise ValueError(f"expected a vector with {space.dim} coordinates, got shape {arr.shape}")
    arr = arr.astype(complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite coordinates")
    if space.field is FieldTag.REAL and np.any(arr.imag != 0):
        raise ValueError("real-field space given a vector with imaginary parts")
    return arr


def _pq_level(p: float, q: float, a, b, t):
    """``(a/t)^p + (b/t)^q`` with overflow short-circuited to ``inf``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ra = np.where(t > 0, a / t, np.inf)
        rb = np.where(t > 0, b / t, np.inf)
        out = np.where(ra > 1, np.inf, np.power(np.minimum(ra, 1.0), p))
        out = out + np.where(rb > 1, np.inf, np.power(np.minimum(rb, 1.0), q))
    out = np.where((a == 0) & (b == 0), 0.0, out)
    return out


def pq_gauge_moduli(p: float, q: float, a, b, rtol: float = GAUGE_RTOL) -> np.ndarray:
    """Vectorised bisection for the gauge of nonnegative coordinates ``(a, b)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.zeros(np.broadcast(a, b).shape)
    hi = a + b
    zero = hi == 0
    for _ in range(200):
        if np.all((hi - lo) <= rtol * hi):
            break
        mid = 0.5 * (lo + hi)
        outside = _pq_level(p, q, a, b, mid) > 1.0
        lo = np.where(outside, mid, lo)
        hi = np.where(outside, hi, mid)
    return np.where(zero, 0.0, 0.5 * (lo + hi))


def pq_gauge_scalar(p: float, q: float, a: float, b: float, rtol: float = GAUGE_RTOL) -> float:
    """Plain-float version of :func:`pq_gauge_moduli` for a single point.

    ``rtol=0`` keeps halving until the bracket cannot shrink any further.
    """
    lo, hi = 0.0, a + b
    if hi == 0.0:
        return 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        ra, rb = a / mid, b / mid
        if ra > 1.0 or rb > 1.0 or ra**p + rb**q > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pq_gauge_newton(p: float, q: float, a, b) -> np.ndarray:
    """Vectorised gauge by Newton's method on ``log(a^p s^p + b^q s^q) = 0``, ``s = 1/t``.

    The left side is convex and increasing in ``log s``, so Newton started to
    the right of the root decreases monotonically onto it.  Much cheaper than
    bisection for batches; used by the sampling code paths.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    top = np.maximum(a, b)
    zero = top == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.log(a)
        lb = np.log(b)
        u = -np.log(np.where(zero, 1.0, top))
        for _ in range(60):
            alpha = p * (la + u)
            beta = q * (lb + u)
            h = np.logaddexp(alpha, beta)
            w = np.exp(alpha - h)
            step = h / (p * w + q * (1.0 - w))
            step = np.where(zero | ~np.isfinite(step), 0.0, np.maximum(step, 0.0))
            u = u - step
            if np.all(step <= 1e-15 * np.maximum(1.0, np.abs(u))):
                break
    return np.where(zero, 0.0, np.exp(-u))


def gauge_moduli(space: SpaceSpec, mods, *, method: str = "bisect") -> np.ndarray:
    """Gauge from coordinate moduli; ``mods`` has the coordinates on the last axis."""
    mods = np.asarray(mods, dtype=float)
    if space.kind is Kind.PQ:
        if method == "newton":
            return pq_gauge_newton(space.p, space.q, mods[..., 0], mods[..., 1])
        return pq_gauge_moduli(space.p, space.q, mods[..., 0], mods[..., 1])
    if space.kind is Kind.LINF:
        return mods.max(axis=-1)
    return mods.sum(axis=-1)


def pq_boundary_y(p: float, q: float, x):
    """Second coordinate of the positive-quadrant boundary point above ``x``."""
    x = np.asarray(x, dtype=float)
    return np.power(np.clip(1.0 - np.power(x, p), 0.0, 1.0), 1.0 / q)


def dual_gauge_moduli(space: SpaceSpec, mods) -> np.ndarray:
    """Dual norm from coordinate moduli (vectorised over leading axes)."""
    mods = np.asarray(mods, dtype=float)
    if space.kind is Kind.LINF:
        return mods.sum(axis=-1)
    if space.kind is Kind.L1:
        return mods.max(axis=-1)
    a = mods[..., 0].reshape(-1)
    b = mods[..., 1].reshape(-1)
    ts = np.linspace(0.0, 1.0, DUAL_GRID)
    ys = pq_boundary_y(space.p, space.q, ts)
    vals = a[:, None] * ts[None, :] + b[:, None] * ys[None, :]
    k = np.argmax(vals, axis=1)
    best = vals[np.arange(a.size), k]
    lo = ts[np.maximum(k - 1, 0)]
    hi = ts[np.minimum(k + 1, DUAL_GRID - 1)]

    def objective(t):
        return a * t + b * pq_boundary_y(space.p, space.q, t)

    _, fx = golden_max(objective, lo, hi, DUAL_TOL)
    return np.maximum(best, fx).reshape(mods.shape[:-1])


def gauge_scalar(space: SpaceSpec, mods) -> float:
    """Gauge of a single point given by its coordinate moduli."""
    if space.kind is Kind.PQ:
        # full double precision here; this is the user-facing evaluation
        return pq_gauge_scalar(space.p, space.q, float(mods[0]), float(mods[1]), rtol=0.0)
    return float(gauge_moduli(space, mods))


def dual_gauge_scalar(space: SpaceSpec, mods) -> float:
    """Dual norm of a single point given by its coordinate moduli."""
    if space.kind is not Kind.PQ:
        return float(dual_gauge_moduli(space, mods))
    a, b = float(mods[0]), float(mods[1])
    ts = np.linspace(0.0, 1.0, DUAL_GRID)
    vals = a * ts + b * pq_boundary_y(space.p, space.q, ts)
    k = int(np.argmax(vals))
    p, inv_q = space.p, 1.0 / space.q

    def objective(t):
        return a * t + b * max(0.0, 1.0 - t**p) ** inv_q

    _, fx = golden_max_scalar(objective, ts[max(k - 1, 0)], ts[min(k + 1, DUAL_GRID - 1)], DUAL_TOL)
    return max(fx, float(vals[k]))


def gauge(space: SpaceSpec, v) -> float:
    """Minkowski functional of the unit ball at ``v``."""
    arr = _as_vector(space, v)
    return gauge_scalar(space, np.abs(arr))


def dual_gauge(space: SpaceSpec, w) -> float:
    """``sup |<w, z>|`` over the closed primal unit ball."""
    arr = _as_vector(space, w)
    return dual_gauge_scalar(space, np.abs(arr))


def boundary_point(space: SpaceSpec, t: float) -> np.ndarray:
    """Positive-quadrant boundary point with first coordinate ``t``.

    For the sup-norm square this traces the top edge ``(t, 1)``; for the
    diamond the edge ``(t, 1 - t)``.
    """
    if space.dim != 2:
        raise ValueError("boundary_point needs a two-dimensional space")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    if space.kind is Kind.PQ:
        y = float(pq_boundary_y(space.p, space.q, t))
    elif space.kind is Kind.LINF:
        y = 1.0
    else:
        y = 1.0 - t
    return np.array([t, y])


def extreme_point_census(space: SpaceSpec, grid: int = 64) -> Census:
    """Decide whether the real unit ball has four extreme points or more.

    The boundary is sampled radially (``grid`` samples per quadrant, whole
    circle).  A sample whose neighbours' midpoint lies strictly inside the
    ball, or a chord whose midpoint does, marks a bend.  Isolated bends are
    vertices; runs of bends longer than a straddled vertex can produce mean a
    strictly convex arc.
    """
    if space.dim != 2:
        raise ValueError("census needs a two-dimensional space")
    if space.field is not FieldTag.REAL:
        raise ValueError("census works on the real unit ball")
    if grid < 8:
        raise ValueError(f"grid must be at least 8, got {grid}")
    m = 4 * grid
    theta = 2.0 * np.pi * np.arange(m) / m
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    dirs[np.abs(dirs) < 1e-15] = 0.0
    pts = dirs / gauge_moduli(space, np.abs(dirs))[:, None]
    nxt = np.roll(pts, -1, axis=0)
    prv = np.roll(pts, 1, axis=0)
    chord_bent = gauge_moduli(space, np.abs(0.5 * (pts + nxt))) < 1.0 - CENSUS_TOL
    point_bent = gauge_moduli(space, np.abs(0.5 * (prv + nxt))) < 1.0 - CENSUS_TOL
    # interleave: point_0, chord_0, point_1, chord_1, ...
    flags = np.empty(2 * m, dtype=bool)
    flags[0::2] = point_bent
    flags[1::2] = chord_bent
    if flags.all():
        return Census.MORE_THAN_FOUR
    start = int(np.argmin(flags))
    flags = np.roll(flags, -start)
    runs = []
    length = 0
    for f in flags:
        if f:
            length += 1
        elif length:
            runs.append(length)
            length = 0
    if length:
        runs.append(length)
    if any(r > 3 for r in runs) or len(runs) > 4:
        return Census.MORE_THAN_FOUR
    return Census.FOUR_VERTICES
