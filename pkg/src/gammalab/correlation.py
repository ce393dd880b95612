"""Correlation-matrix optimisation and the sup-norm route to gamma.

``beta(A)`` maximises ``<A, B>`` over correlation matrices ``B`` (PSD, unit
diagonal).  Such a ``B`` is the Gram matrix of unit rows ``V``, and the
search ascends ``tr(V* A V)`` with the rows renormalised after every step.
Because the objective is convex in ``V``, the renormalised gradient step never
decreases it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .config import OptimizerConfig
from .gamma import TOP_K, GammaReport, _summarise
from .linalg import FieldTag, HermitianMatrix, eigvalsh, hs_inner, require_psd
from .opnorm import rank1_optimum

RANK_TOL = 1e-7
STEP_IMPROVEMENT = 1e-10
MAX_HALVINGS = 30
# gradient steps are taken on A scaled to max diagonal STEP_GAIN; larger is
# monotone too (convex objective) and converges several times faster than 1
STEP_GAIN = 32.0
SCREEN_DRAWS = 24
OUTER_PASSES = 3
LINF_MAX_N = 4
_INNER_STARTS = 3
# Cholesky-parameter resolution; the ratio is flat to ~1e-8 at this scale
OUTER_XATOL = 1e-4
_INNER_ITERS = 150


@dataclass(frozen=True, eq=False)
class CorrelationFactor:
    """Rows of unit vectors; their Gram matrix is a correlation matrix."""

    rows: np.ndarray
    field: FieldTag

    def __post_init__(self):
        rows = np.array(self.rows, dtype=complex if self.field is FieldTag.COMPLEX else float)
        if rows.ndim != 2:
            raise ValueError("factor rows must form a 2-D array")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms == 0):
            raise ValueError("factor has a zero row")
        rows = rows / norms[:, None]
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "field", FieldTag.coerce(self.field))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def r(self) -> int:
        return self.rows.shape[1]

    def matrix(self) -> HermitianMatrix:
        g = self.rows @ self.rows.conj().T
        np.fill_diagonal(g, 1.0)
        return HermitianMatrix.from_array(g, self.field, tol=1e-10)


@dataclass
class BetaReport:
    value: float
    factor: CorrelationFactor
    rank_estimate: int
    rank1_value: float
    gap: float
    field: FieldTag

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "rank_estimate": self.rank_estimate,
            "rank1_value": self.rank1_value,
            "gap": self.gap,
            "field": self.field.value,
            "correlation": self.factor.matrix().to_json(),
        }


def _rownorm(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _objective(mat: np.ndarray, v: np.ndarray) -> np.ndarray:
    # tr(V* A V) for a batch of factors
    return np.real(np.einsum("sij,ik,skj->s", v.conj(), mat, v))


def _ascend(mat: np.ndarray, v: np.ndarray, max_iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Projected gradient ascent on a batch of factors; returns (V, values)."""
    scale = max(float(np.max(np.real(np.diag(mat)))), 1e-300)
    unit = mat * (STEP_GAIN / scale)
    val = _objective(unit, v)
    eta = np.ones(v.shape[0])
    active = np.ones(v.shape[0], dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        grad = np.einsum("ik,skj->sij", unit, v)
        eta = np.where(active, 1.0, eta)
        accepted = np.zeros_like(active)
        new_v, new_val = v, val
        for _ in range(MAX_HALVINGS):
            trial = _rownorm(v + eta[:, None, None] * grad)
            tval = _objective(unit, trial)
            ok = active & ~accepted & (tval > val)
            new_v = np.where(ok[:, None, None], trial, new_v)
            new_val = np.where(ok, tval, new_val)
            accepted |= ok
            pending = active & ~accepted
            if not pending.any():
                break
            eta = np.where(pending, 0.5 * eta, eta)
        gain = new_val - val
        v, val = new_v, new_val
        active = active & accepted & (gain >= STEP_IMPROVEMENT * STEP_GAIN)
    return v, val * (scale / STEP_GAIN)


def _starts(n: int, field: FieldTag, count: int, gen: np.random.Generator, z1: np.ndarray) -> np.ndarray:
    shape = (count, n, n)
    v = gen.standard_normal(shape)
    if field is FieldTag.COMPLEX:
        v = v + 1j * gen.standard_normal(shape)
    warm = np.zeros((1, n, n), dtype=v.dtype)
    warm[0, :, 0] = z1 if field is FieldTag.COMPLEX else np.real(z1)
    # small full-rank perturbation lets the warm start leave the rank-one face
    nudged = warm + 1e-3 * v[:1]
    return _rownorm(np.concatenate([warm, nudged, v], axis=0))


def _beta_core(mat: np.ndarray, field: FieldTag, starts: int, max_iters: int, gen) -> tuple[float, np.ndarray, float]:
    r1, z1 = rank1_optimum(mat, field)
    v0 = _starts(mat.shape[0], field, starts, gen, z1)
    v, vals = _ascend(mat, v0, max_iters)
    k = int(np.argmax(vals))
    return float(vals[k]), v[k], r1


def _field_matrix(a: HermitianMatrix, field: FieldTag | str | None) -> tuple[np.ndarray, FieldTag]:
    field = a.field if field is None else FieldTag.coerce(field)
    if field is FieldTag.REAL and a.field is FieldTag.COMPLEX:
        raise ValueError("a complex matrix cannot be optimised over real correlations")
    mat = a.values.astype(complex) if field is FieldTag.COMPLEX else a.re.copy()
    return mat, field


def beta(a: HermitianMatrix, cfg: OptimizerConfig | None = None, field: FieldTag | str | None = None) -> BetaReport:
    """Maximise ``<A, B>`` over n x n correlation matrices of the given field."""
    cfg = cfg or OptimizerConfig()
    require_psd(a)
    mat, field = _field_matrix(a, field)
    value, v, r1 = _beta_core(mat, field, cfg.restarts, cfg.max_iters, cfg.rng.generator())
    factor = CorrelationFactor(v, field)
    value = max(value, hs_inner(a.as_field(field), factor.matrix()))
    rank = extreme_rank_diagnostic(factor)
    return BetaReport(value, factor, rank, r1, value - r1, field)


def rank1_beta(a: HermitianMatrix, field: FieldTag | str | None = None) -> float:
    """``<A, z z*>`` maximised over sign (real) or unimodular (complex) ``z``."""
    require_psd(a)
    mat, field = _field_matrix(a, field)
    return rank1_optimum(mat, field)[0]


def extreme_rank_diagnostic(factor: CorrelationFactor, tol: float = RANK_TOL) -> int:
    """Numerical rank of the induced correlation matrix."""
    w = eigvalsh(factor.matrix())
    return int(np.sum(w > tol * w[-1]))


def _cholesky_from_params(x: np.ndarray, n: int, field: FieldTag) -> np.ndarray:
    low = np.zeros((n, n), dtype=complex if field is FieldTag.COMPLEX else float)
    rows, cols = np.tril_indices(n)
    k = rows.size
    low[rows, cols] = x[:k]
    if field is FieldTag.COMPLEX:
        strict = rows != cols
        low[rows[strict], cols[strict]] += 1j * x[k:]
    return low @ low.conj().T


def _param_count(n: int, field: FieldTag) -> int:
    k = n * (n + 1) // 2
    return k + (n * (n - 1) // 2 if field is FieldTag.COMPLEX else 0)


def gamma_linf(n: int, field: FieldTag | str, cfg: OptimizerConfig | None = None) -> GammaReport:
    """gamma of the n-dimensional sup-norm space as ``sup beta(A) / ||A||_{inf->1}``.

    The outer search runs Nelder-Mead over Cholesky factors of ``A``; the
    inner ``beta`` uses a few ascent starts plus the rank-one warm start.
    Every restart's end point is re-evaluated with the full ``beta``.
    """
    cfg = cfg or OptimizerConfig()
    field = FieldTag.coerce(field)
    if not 2 <= n <= LINF_MAX_N:
        raise ValueError(f"gamma_linf supports 2 <= n <= {LINF_MAX_N}, got {n}")
    dim = _param_count(n, field)

    def ratio(x: np.ndarray, gen) -> float:
        mat = _cholesky_from_params(x, n, field)
        value, _, r1 = _beta_core(mat, field, _INNER_STARTS, _INNER_ITERS, gen)
        return value / r1 if r1 > 0 else 1.0

    results = []
    for r in range(cfg.restarts):
        child = cfg.rng.child(r)
        inner_seed = child.child(1)

        def neg_ratio(x):
            return -ratio(x, inner_seed.generator())

        # screen a few random shapes: most of the cone sits on the ratio-1 plateau
        draws = child.generator().standard_normal((SCREEN_DRAWS, dim))
        scores = [neg_ratio(x) for x in draws]
        x, fx = draws[int(np.argmin(scores))], min(scores)
        for _ in range(OUTER_PASSES):
            res = minimize(
                neg_ratio,
                x,
                method="Nelder-Mead",
                options={"maxfev": cfg.max_iters, "xatol": OUTER_XATOL, "fatol": cfg.value_tol},
            )
            gain = fx - float(res.fun)
            if gain < 0:
                break
            x, fx = np.asarray(res.x), float(res.fun)
            if gain < cfg.value_tol:
                break
        mat = _cholesky_from_params(x, n, field)
        a = HermitianMatrix.from_array(mat, field, tol=1e-9)
        rep = beta(a, cfg.with_(seed=child.child(2).seed))
        wa = a.scaled(1.0 / rep.rank1_value)
        wb = rep.factor.matrix()
        results.append((wa, wb, hs_inner(wa, wb)))
    values = [v for _, _, v in results]
    best = int(np.argmax(values))
    wa, wb, value = results[best]
    converged, spread = _summarise(values, cfg)
    notes = [] if converged else [f"top-{TOP_K} restart spread {spread:.3g} exceeds {cfg.agreement_tol:g}"]
    label = f"linf:{n} ({field.value})"
    return GammaReport(value, wa, wb, cfg.restarts, converged, values, label, "correlation", spread, notes)
