"""Verification suites shared by the CLI and the acceptance tests.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row does.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .config import OptimizerConfig
from .correlation import gamma_linf
from .gamma import THEOREM1_TOL, verify_theorem1
from .linalg import FieldTag, HermitianMatrix, SeededRng, abs_entrywise, random_psd
from .opnorm import NormSide, direct_quad_form_sup, naive_quad_form_sup, quad_form_sup
from .spaces import SpaceSpec

THEOREM1_GRID = ((1.0, 2.0), (2.0, 2.0), (3.0, 4.0), (1.5, 8.0))
REDUCTION_RTOL = 1e-8
NAIVE_RTOL = 1e-3
NAIVE_SLACK = 1e-9
PROPERTY_P_TOL = 2e-3
PROPERTY_P_FLOOR = 1e-6
REAL_GAP_TARGET = 1.125
REAL_GAP_TOL = 1e-3

# spaces visited round-robin by the reduction suite
SUITE_SPACES = (
    (1.0, 2.0),
    (1.5, 3.0),
    (2.0, 2.0),
    (3.0, 4.0),
    (1.5, 8.0),
    (1.0, 1.0),
    (8.0, 1.2),
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    values: dict = field(default_factory=dict)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _suite_case(k: int) -> tuple[SpaceSpec, NormSide]:
    p, q = SUITE_SPACES[k % len(SUITE_SPACES)]
    side = NormSide.PRIMAL_TO_DUAL if (k // len(SUITE_SPACES)) % 2 == 0 else NormSide.DUAL_TO_PRIMAL
    return SpaceSpec.pq(p, q, FieldTag.COMPLEX), side


def lemma_suite(count: int = 200, seed: int = 42) -> list[Check]:
    """Reduction equalities and the sampling oracle on seeded random 2x2 PSD matrices."""
    root = SeededRng(seed)
    worst = {"modulus": 0.0, "signed": 0.0, "moduli-ball": 0.0, "naive": 0.0}
    excess = 0.0
    for k in range(count):
        space, side = _suite_case(k)
        real_space = space.with_field(FieldTag.REAL)
        # complex off-diagonal phases: reduced path against the unreduced phase search
        a = random_psd(2, FieldTag.COMPLEX, root.child(0).child(k))
        reduced = quad_form_sup(a, space, side)
        worst["modulus"] = max(worst["modulus"], _rel(reduced, direct_quad_form_sup(a, space, side)))
        # real signed off-diagonal against its modulus
        r = random_psd(2, FieldTag.REAL, root.child(1).child(k))
        signed = direct_quad_form_sup(r, real_space, side)
        folded = direct_quad_form_sup(abs_entrywise(r), real_space, side)
        worst["signed"] = max(worst["signed"], _rel(signed, folded))
        # |A| on the complex ball against the real moduli ball
        c = random_psd(2, FieldTag.COMPLEX, root.child(2).child(k))
        m = abs_entrywise(c)
        over_c = direct_quad_form_sup(m.as_field(FieldTag.COMPLEX), space, side)
        over_r = direct_quad_form_sup(m.as_field(FieldTag.REAL), real_space, side)
        worst["moduli-ball"] = max(worst["moduli-ball"], _rel(over_c, over_r))
        naive = naive_quad_form_sup(a, space, side, rng=root.child(3).child(k))
        worst["naive"] = max(worst["naive"], max(reduced - naive, 0.0) / max(reduced, 1e-300))
        excess = max(excess, naive - reduced)
    checks = []
    for name in ("modulus", "signed", "moduli-ball"):
        ok = worst[name] <= REDUCTION_RTOL
        checks.append(Check(name, ok, f"max rel diff {worst[name]:.3e} (tol {REDUCTION_RTOL:g}, n={count})", {"max_rel": worst[name]}))
    ok = worst["naive"] <= NAIVE_RTOL and excess <= NAIVE_SLACK
    detail = f"max rel shortfall {worst['naive']:.3e} (tol {NAIVE_RTOL:g}), max excess {excess:.3e}"
    checks.append(Check("naive", ok, detail, {"max_rel": worst["naive"], "max_excess": excess}))
    return checks


def theorem1_suite(cfg: OptimizerConfig | None = None, tol: float = THEOREM1_TOL, grid=THEOREM1_GRID) -> list[Check]:
    """Real moduli search against the direct complex search over a (p, q) grid."""
    cfg = cfg or OptimizerConfig()
    checks = []
    for p, q in grid:
        rep = verify_theorem1(p, q, cfg, tol)
        ok = rep.passed and rep.converged
        detail = (
            f"real {rep.gamma_real:.6f} complex {rep.gamma_complex:.6f} diff {rep.abs_diff:.2e}"
            f" converged {rep.converged}"
        )
        values = {
            "p": p,
            "q": q,
            "gamma_real": rep.gamma_real,
            "gamma_complex": rep.gamma_complex,
            "abs_diff": rep.abs_diff,
            "converged": rep.converged,
        }
        checks.append(Check(f"theorem1 p={p:g} q={q:g}", ok, detail, values))
    return checks


def property_p_suite(cfg: OptimizerConfig | None = None, tol: float = PROPERTY_P_TOL) -> list[Check]:
    """gamma of the sup-norm spaces: complex n = 2, 3 should be 1, real n = 3 above it."""
    cfg = cfg or OptimizerConfig()
    checks = []
    for n, fld in ((2, FieldTag.COMPLEX), (3, FieldTag.COMPLEX), (3, FieldTag.REAL)):
        start = time.perf_counter()
        rep = gamma_linf(n, fld, cfg)
        seconds = time.perf_counter() - start
        if fld is FieldTag.COMPLEX:
            ok = 1.0 - PROPERTY_P_FLOOR <= rep.value <= 1.0 + tol
            want = f"in [{1 - PROPERTY_P_FLOOR:g}, {1 + tol:g}]"
        else:
            ok = rep.value >= REAL_GAP_TARGET - REAL_GAP_TOL
            want = f">= {REAL_GAP_TARGET - REAL_GAP_TOL:g}"
        detail = f"value {rep.value:.6f} {want} converged {rep.converged}"
        values = {"n": n, "field": fld.value, "value": rep.value, "converged": rep.converged, "seconds": seconds}
        checks.append(Check(f"linf:{n} {fld.value}", ok, detail, values))
    return checks


def triangle_matrix() -> HermitianMatrix:
    """Unit diagonal, all off-diagonal entries -1/2."""
    return HermitianMatrix.from_array([[1.0, -0.5, -0.5], [-0.5, 1.0, -0.5], [-0.5, -0.5, 1.0]], FieldTag.REAL)
