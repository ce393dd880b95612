"""Operator norms of PSD matrices between a space and its dual.

For a PSD matrix the norm from the space to its dual is the supremum of the
Hermitian quadratic form over the unit ball (and from the dual to the space,
over the dual ball).  In two dimensions the supremum is found along rays:
maximise ``Q(d) / g(d)^2`` over unit directions ``d`` where ``g`` is the
relevant gauge.  For the reduced path the off-diagonal entry is first
replaced by its modulus, which confines the search to the positive quadrant.
"""

from __future__ import annotations

import enum
import functools
import math

import numpy as np

from ._search import golden_max_scalar, grid_then_golden
from .linalg import FieldTag, HermitianMatrix, SeededRng, abs_entrywise, require_psd
from .spaces import (
    Kind,
    SpaceSpec,
    dual_gauge_moduli,
    dual_gauge_scalar,
    gauge_moduli,
    gauge_scalar,
)

THETA_GRID = 512
PHASE_RESTARTS = 16
PHASE_MAX_ITERS = 200
PHASE_TOL = 1e-10
_DIRECT_PHASE_GRID = 64
# theta resolution; polygonal balls put the optimum on a kink, where the error is first order
RAY_TOL = 1e-13


class NormSide(str, enum.Enum):
    PRIMAL_TO_DUAL = "primal_to_dual"
    DUAL_TO_PRIMAL = "dual_to_primal"

    @classmethod
    def coerce(cls, value: "NormSide | str") -> "NormSide":
        if isinstance(value, cls):
            return value
        aliases = {"primal": cls.PRIMAL_TO_DUAL, "dual": cls.DUAL_TO_PRIMAL}
        text = str(value).lower()
        if text in aliases:
            return aliases[text]
        return cls(text)


def _side_gauges(space: SpaceSpec, side: NormSide):
    """(vectorised, scalar) gauge functions of moduli for the ball on ``side``."""
    if side is NormSide.PRIMAL_TO_DUAL:
        return (lambda m: gauge_moduli(space, m)), (lambda m: gauge_scalar(space, m))
    return (lambda m: dual_gauge_moduli(space, m)), (lambda m: dual_gauge_scalar(space, m))


def _check_inputs(a: HermitianMatrix, space: SpaceSpec) -> None:
    if a.n != space.dim:
        raise ValueError(f"dimension mismatch: matrix is {a.n}x{a.n}, space has dim {space.dim}")
    if space.field is FieldTag.REAL and a.field is FieldTag.COMPLEX:
        raise ValueError("complex matrix given for a real-field space")
    require_psd(a)


@functools.lru_cache(maxsize=256)
def direction_table(space: SpaceSpec, side: NormSide, points: int) -> np.ndarray:
    """Ray coefficients on a quadrant grid: rows ``cos^2/g^2, sin^2/g^2, 2 cos sin/g^2``.

    ``coeffs.T @ (a11, a22, c)`` is then the ray objective at every grid
    direction.  Cached per space; the array is read-only.
    """
    theta = np.linspace(0.0, 0.5 * np.pi, points)
    c, s = np.cos(theta), np.sin(theta)
    c[-1] = 0.0
    vec, _ = _side_gauges(space, side)
    g2 = vec(np.stack([c, s], axis=-1)) ** 2
    out = np.stack([c * c / g2, s * s / g2, 2.0 * c * s / g2])
    out.flags.writeable = False
    return out


def _ray_sup_real(a11: float, a22: float, a12: float, space: SpaceSpec, side: NormSide, full_circle: bool) -> float:
    vec, scal = _side_gauges(space, side)

    def objective(theta):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        num = a11 * c * c + a22 * s * s + 2.0 * a12 * c * s
        if theta.ndim == 0:
            return float(num) / scal((abs(float(c)), abs(float(s)))) ** 2
        g = vec(np.stack([np.abs(c), np.abs(s)], axis=-1))
        return num / g**2

    hi = np.pi if full_circle else 0.5 * np.pi
    points = 2 * THETA_GRID if full_circle else THETA_GRID
    # the half circle is a full period of the direction objective
    _, val = grid_then_golden(objective, 0.0, hi, points, RAY_TOL, periodic=full_circle)
    return max(val, 0.0)


def quad_form_sup(a: HermitianMatrix, space: SpaceSpec, side: NormSide | str = NormSide.PRIMAL_TO_DUAL) -> float:
    """Norm of PSD ``a`` as a map from the space to its dual (or dual to space).

    Two-dimensional spaces go through the modulus reduction and a ray search
    on the positive quadrant of the real ball.  The sup/sum norms in higher
    dimension use the exact sign/phase formulas.
    """
    side = NormSide.coerce(side)
    _check_inputs(a, space)
    if space.dim > 2:
        sup_side = (space.kind is Kind.LINF) == (side is NormSide.PRIMAL_TO_DUAL)
        if sup_side:
            return linf_to_l1_norm(a, space.field)
        return l1_to_linf_norm(a)
    red = abs_entrywise(a)
    return _ray_sup_real(red.re[0, 0], red.re[1, 1], red.re[0, 1], space, side, full_circle=False)


def direct_quad_form_sup(
    a: HermitianMatrix, space: SpaceSpec, side: NormSide | str = NormSide.PRIMAL_TO_DUAL
) -> float:
    """Same norm as :func:`quad_form_sup` without the modulus reduction.

    Real field: rays over the half circle with the signed off-diagonal entry.
    Complex field: rays ``(cos t, e^{i chi} sin t)`` with the relative phase
    ``chi`` searched numerically for every ray.
    """
    side = NormSide.coerce(side)
    _check_inputs(a, space)
    if space.dim != 2:
        raise ValueError("direct evaluation is implemented for two-dimensional spaces")
    a11, a22 = float(a.re[0, 0]), float(a.re[1, 1])
    if space.field is FieldTag.REAL:
        return _ray_sup_real(a11, a22, float(a.re[0, 1]), space, side, full_circle=True)
    a12 = complex(a.re[0, 1], a.im[0, 1])
    vec, scal = _side_gauges(space, side)

    def numerator(theta, chi):
        c, s = np.cos(theta), np.sin(theta)
        return a11 * c * c + a22 * s * s + 2.0 * c * s * np.real(a12 * np.exp(-1j * chi))

    thetas = np.linspace(0.0, 0.5 * np.pi, THETA_GRID // 2)
    chis = np.linspace(0.0, 2.0 * np.pi, _DIRECT_PHASE_GRID, endpoint=False)
    g = vec(np.stack([np.abs(np.cos(thetas)), np.abs(np.sin(thetas))], axis=-1))
    table = numerator(thetas[:, None], chis[None, :]) / (g**2)[:, None]
    i, j = np.unravel_index(int(np.argmax(table)), table.shape)
    best = float(table[i, j])
    step = chis[1] - chis[0]

    def best_over_phase(theta: float) -> float:
        row = numerator(theta, chis)
        k = int(np.argmax(row))
        _, val = golden_max_scalar(
            lambda x: float(numerator(theta, x)), chis[k] - step, chis[k] + step, 1e-12
        )
        val = max(val, float(row[k]))
        z = np.array([math.cos(theta), math.sin(theta) * np.exp(1j * chis[k])])
        return val / scal(np.abs(z)) ** 2

    lo = thetas[max(i - 1, 0)]
    hi = thetas[min(i + 1, thetas.size - 1)]
    _, val = golden_max_scalar(best_over_phase, lo, hi, 1e-10)
    return max(best, val, 0.0)


def naive_quad_form_sup(
    a: HermitianMatrix,
    space: SpaceSpec,
    side: NormSide | str = NormSide.PRIMAL_TO_DUAL,
    rng: SeededRng | None = None,
    samples: int = 16,
    iters: int = 150,
) -> float:
    """Sampling lower bound for the same norm, with no structural reduction.

    Random starting vectors over the field are improved by a stochastic hill
    climb on ``z* a z / g(z)^2``; the best ratio found is returned.
    """
    side = NormSide.coerce(side)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    _check_inputs(a, space)
    rng = rng or SeededRng(0)
    gen = rng.generator()
    n = space.dim
    mat = a.values.astype(complex) if space.field is FieldTag.COMPLEX else a.re
    cplx = space.field is FieldTag.COMPLEX

    if side is NormSide.PRIMAL_TO_DUAL:
        if space.kind is Kind.PQ:

            def gfun(m):
                return gauge_moduli(space, m, method="newton")

        else:

            def gfun(m):
                return gauge_moduli(space, m)

    else:

        def gfun(m):
            return dual_gauge_moduli(space, m)

    def draw(shape):
        z = gen.standard_normal(shape)
        if cplx:
            z = z + 1j * gen.standard_normal(shape)
        return z

    def ratio(z):
        num = np.real(np.einsum("ki,ij,kj->k", z.conj(), mat, z))
        g = gfun(np.abs(z))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / g**2
        return np.where(g > 0, out, -np.inf)

    z = draw((samples, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    val = ratio(z)
    sigma = np.full(samples, 0.3)
    for _ in range(iters):
        cand = z + sigma[:, None] * draw((samples, n))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cval = ratio(cand)
        better = cval > val
        z = np.where(better[:, None], cand, z)
        val = np.where(better, cval, val)
        sigma = np.clip(np.where(better, sigma * 1.2, sigma * 0.9), 1e-9, 1.0)
    return max(float(np.max(val)), 0.0)


def _top_eigvec(mat: np.ndarray) -> np.ndarray:
    # only seeds the phase ascent, so LAPACK accuracy is plenty
    _, v = np.linalg.eigh(mat)
    return v[:, -1]


def rank1_optimum(mat: np.ndarray, field: FieldTag, rng: SeededRng | None = None) -> tuple[float, np.ndarray]:
    """``max z* A z`` over sign vectors (real) or unimodular vectors (complex).

    Returns the value and a maximiser.  Real field enumerates every sign
    pattern with the first coordinate fixed; complex field runs coordinate
    phase ascent from the top eigenvector's phases plus random phases.
    """
    n = mat.shape[0]
    if field is FieldTag.REAL:
        mat = np.real(mat)
        signs = np.ones((2 ** (n - 1), n))
        for k in range(1, n):
            signs[:, k] = np.where((np.arange(2 ** (n - 1)) >> (k - 1)) & 1, -1.0, 1.0)
        vals = np.einsum("ki,ij,kj->k", signs, mat, signs)
        k = int(np.argmax(vals))
        return float(vals[k]), signs[k]

    mat = np.asarray(mat, dtype=complex)
    gen = (rng or SeededRng(0)).generator()
    top = _top_eigvec(mat)
    start = np.where(np.abs(top) > 1e-14, top / np.where(np.abs(top) > 0, np.abs(top), 1.0), 1.0)
    phases = gen.uniform(0.0, 2.0 * np.pi, size=(PHASE_RESTARTS - 1, n))
    z = np.vstack([start[None, :], np.exp(1j * phases)])
    diag = np.real(np.diag(mat))
    for _ in range(PHASE_MAX_ITERS):
        moved = 0.0
        for i in range(n):
            r = z @ mat[i, :] - diag[i] * z[:, i]
            mag = np.abs(r)
            new = np.where(mag > 1e-300, r / np.where(mag > 0, mag, 1.0), z[:, i])
            moved = max(moved, float(np.max(np.abs(new - z[:, i]))))
            z[:, i] = new
        if moved < PHASE_TOL:
            break
    vals = np.real(np.einsum("ki,ij,kj->k", z.conj(), mat, z))
    k = int(np.argmax(vals))
    return float(vals[k]), z[k]


def linf_to_l1_norm(a: HermitianMatrix, field: FieldTag | str | None = None) -> float:
    """Norm of PSD ``a`` from the sup norm to the sum norm (same n)."""
    field = a.field if field is None else FieldTag.coerce(field)
    if field is FieldTag.REAL and a.field is FieldTag.COMPLEX:
        raise ValueError("sign enumeration needs a real matrix")
    require_psd(a)
    value, _ = rank1_optimum(a.values, field)
    return value


def l1_to_linf_norm(b: HermitianMatrix) -> float:
    """Norm from the sum norm to the sup norm: the largest entry modulus."""
    mods = np.hypot(b.re, b.im)
    value = float(mods.max())
    if float(np.diag(b.re).min()) >= 0.0 and np.all(mods**2 <= np.outer(np.diag(b.re), np.diag(b.re)) * (1 + 1e-9) + 1e-15):
        # PSD-compatible entries: |b_ij| <= sqrt(b_ii b_jj), so the diagonal dominates
        assert abs(value - float(np.diag(b.re).max())) <= 1e-9 * max(1.0, value)
    return value
