import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import norm_ref, rank1_phase_grid, triangle
from gammalab.linalg import FieldTag, HermitianMatrix, NotPSDError, SeededRng, abs_entrywise, random_psd
from gammalab.opnorm import (
    NormSide,
    direct_quad_form_sup,
    l1_to_linf_norm,
    linf_to_l1_norm,
    naive_quad_form_sup,
    quad_form_sup,
)
from gammalab.spaces import SpaceSpec

H = HermitianMatrix.from_array
P2D, D2P = NormSide.PRIMAL_TO_DUAL, NormSide.DUAL_TO_PRIMAL
seeds = st.integers(min_value=0, max_value=2**32 - 1)
exps = st.floats(min_value=1.0, max_value=16.0)
sides = st.sampled_from([P2D, D2P])


class TestExamples:
    def test_linf(self):
        s = SpaceSpec.linf(2)
        assert quad_form_sup(HermitianMatrix.identity(2), s, P2D) == pytest.approx(2.0, rel=1e-12)
        assert quad_form_sup(H([[1, 1], [1, 1]]), s, P2D) == pytest.approx(4.0, rel=1e-12)

    def test_linf_complex_phase(self):
        a = H([[1, 1j], [-1j, 1]])
        s = SpaceSpec.linf(2, FieldTag.COMPLEX)
        assert quad_form_sup(a, s, P2D) == pytest.approx(4.0, rel=1e-12)
        assert direct_quad_form_sup(a, s, P2D) == pytest.approx(4.0, rel=1e-10)
        assert naive_quad_form_sup(a, s, P2D, SeededRng(0)) == pytest.approx(4.0, abs=1e-3)

    def test_euclidean(self):
        assert quad_form_sup(HermitianMatrix.identity(2), SpaceSpec.pq(2, 2), P2D) == pytest.approx(1.0, rel=1e-12)

    def test_naive_examples(self):
        s = SpaceSpec.linf(2, FieldTag.COMPLEX)
        i2 = HermitianMatrix.identity(2, FieldTag.COMPLEX)
        v = naive_quad_form_sup(i2, s, P2D, SeededRng(1))
        assert 2 - 1e-3 <= v <= quad_form_sup(i2, s, P2D) + 1e-9
        assert naive_quad_form_sup(H(np.zeros((2, 2))), s, P2D) == 0.0
        with pytest.raises(ValueError):
            naive_quad_form_sup(i2, s, P2D, samples=0)

    def test_higher_dim(self):
        i3 = HermitianMatrix.identity(3, FieldTag.COMPLEX)
        assert linf_to_l1_norm(i3, FieldTag.COMPLEX) == pytest.approx(3.0, rel=1e-12)
        assert linf_to_l1_norm(H(triangle()), FieldTag.REAL) == pytest.approx(4.0, abs=1e-14)
        assert linf_to_l1_norm(H(triangle()), FieldTag.COMPLEX) == pytest.approx(4.5, rel=1e-10)
        assert l1_to_linf_norm(HermitianMatrix.identity(3)) == 1.0
        assert l1_to_linf_norm(H([[2, 1], [1, 2]])) == 2.0
        assert l1_to_linf_norm(H([[0, 3], [3, 0]])) == 3.0

    def test_sup_sum_dispatch(self):
        a = H(triangle())
        assert quad_form_sup(a, SpaceSpec.linf(3), P2D) == pytest.approx(4.0)
        assert quad_form_sup(a, SpaceSpec.l1(3), P2D) == 1.0
        assert quad_form_sup(a, SpaceSpec.l1(3), D2P) == pytest.approx(4.0)

    def test_errors(self):
        with pytest.raises(NotPSDError):
            quad_form_sup(H([[1, 2], [2, 1]]), SpaceSpec.pq(2, 2))
        with pytest.raises(ValueError):
            quad_form_sup(HermitianMatrix.identity(3), SpaceSpec.pq(2, 2))
        with pytest.raises(ValueError):
            quad_form_sup(H([[1, 0.5j], [-0.5j, 1]]), SpaceSpec.pq(2, 2))

    def test_side_aliases(self):
        assert NormSide.coerce("dual") is D2P
        assert NormSide.coerce("primal") is P2D
        with pytest.raises(ValueError):
            NormSide.coerce("sideways")


class TestOracle:
    """Independent route: ||A|| = sup over unit u of g(A^{1/2} u)^2."""

    @pytest.mark.parametrize("p,q", [(1, 2), (1.5, 3), (2, 2), (3, 4), (1.5, 8), (8, 1.2)])
    @pytest.mark.parametrize("side", [P2D, D2P])
    def test_real(self, p, q, side):
        root = SeededRng(11)
        s = SpaceSpec.pq(p, q)
        for k in range(6):
            a = random_psd(2, FieldTag.REAL, root.child(k))
            ref = norm_ref(a.re, p, q, side.value)
            assert quad_form_sup(a, s, side) == pytest.approx(ref, rel=2e-6)

    @pytest.mark.parametrize("p,q", [(1, 2), (2, 2), (3, 4)])
    @pytest.mark.parametrize("side", [P2D, D2P])
    def test_complex(self, p, q, side):
        root = SeededRng(12)
        s = SpaceSpec.pq(p, q, FieldTag.COMPLEX)
        for k in range(3):
            a = random_psd(2, FieldTag.COMPLEX, root.child(k))
            ref = norm_ref(a.values, p, q, side.value)
            assert quad_form_sup(a, s, side) == pytest.approx(ref, rel=2e-4)

    def test_complex_triangle_phase_grid(self):
        assert rank1_phase_grid(triangle()) == pytest.approx(4.5, abs=1e-3)


class TestReductions:
    @given(seeds, exps, exps, sides)
    @settings(max_examples=100, deadline=None)
    def test_modulus_equality(self, seed, p, q, side):
        s = SpaceSpec.pq(p, q, FieldTag.COMPLEX)
        a = random_psd(2, FieldTag.COMPLEX, SeededRng(seed))
        ref = quad_form_sup(a, s, side)
        assert quad_form_sup(abs_entrywise(a), s, side) == pytest.approx(ref, rel=1e-8)
        assert direct_quad_form_sup(a, s, side) == pytest.approx(ref, rel=1e-8)

    @given(seeds, exps, exps, sides)
    @settings(max_examples=100, deadline=None)
    def test_real_signed_equality(self, seed, p, q, side):
        s = SpaceSpec.pq(p, q)
        a = random_psd(2, FieldTag.REAL, SeededRng(seed))
        assert direct_quad_form_sup(a, s, side) == pytest.approx(
            direct_quad_form_sup(abs_entrywise(a), s, side), rel=1e-8
        )

    @given(seeds, exps, exps, sides)
    @settings(max_examples=100, deadline=None)
    def test_complex_vs_real_moduli(self, seed, p, q, side):
        m = abs_entrywise(random_psd(2, FieldTag.COMPLEX, SeededRng(seed)))
        c = direct_quad_form_sup(m.as_field("complex"), SpaceSpec.pq(p, q, "complex"), side)
        r = direct_quad_form_sup(m.as_field("real"), SpaceSpec.pq(p, q), side)
        assert c == pytest.approx(r, rel=1e-8)

    @given(seeds, exps, exps, sides)
    @settings(max_examples=100, deadline=None)
    def test_naive_bounds(self, seed, p, q, side):
        s = SpaceSpec.pq(p, q, FieldTag.COMPLEX)
        rng = SeededRng(seed)
        a = random_psd(2, FieldTag.COMPLEX, rng.child(0))
        ref = quad_form_sup(a, s, side)
        v = naive_quad_form_sup(a, s, side, rng.child(1))
        assert v <= ref + 1e-9
        assert v >= ref * (1 - 1e-3)


class TestInvariants:
    @given(seeds, exps, exps, sides, st.floats(0, 50))
    @settings(max_examples=100, deadline=None)
    def test_homogeneity(self, seed, p, q, side, c):
        s = SpaceSpec.pq(p, q)
        a = random_psd(2, FieldTag.REAL, SeededRng(seed))
        assert quad_form_sup(a.scaled(c), s, side) == pytest.approx(c * quad_form_sup(a, s, side), rel=1e-12, abs=1e-300)

    @given(seeds, exps, exps, sides)
    @settings(max_examples=100, deadline=None)
    def test_monotone(self, seed, p, q, side):
        s = SpaceSpec.pq(p, q, FieldTag.COMPLEX)
        rng = SeededRng(seed)
        a = random_psd(2, FieldTag.COMPLEX, rng.child(0))
        g = random_psd(2, FieldTag.COMPLEX, rng.child(1)).scaled(0.1)
        bigger = H(a.values + g.values)
        assert quad_form_sup(a, s, side) <= quad_form_sup(bigger, s, side) + 1e-9

    @given(seeds, st.integers(2, 8))
    @settings(max_examples=40, deadline=None)
    def test_sign_enumeration_vs_brute(self, seed, n):
        a = random_psd(n, FieldTag.REAL, SeededRng(seed))
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * n)).reshape(n, -1).T
        ref = float(np.max(np.einsum("ki,ij,kj->k", signs, a.re, signs)))
        assert linf_to_l1_norm(a, FieldTag.REAL) == pytest.approx(ref, rel=1e-14)

    @given(seeds, st.integers(2, 8))
    @settings(max_examples=40, deadline=None)
    def test_phase_at_least_sign(self, seed, n):
        a = random_psd(n, FieldTag.REAL, SeededRng(seed))
        assert linf_to_l1_norm(a, FieldTag.COMPLEX) >= linf_to_l1_norm(a, FieldTag.REAL) - 1e-9

    @given(seeds, st.integers(2, 8), st.sampled_from(["real", "complex"]))
    @settings(max_examples=40, deadline=None)
    def test_l1_linf_is_max_diagonal(self, seed, n, field):
        a = random_psd(n, field, SeededRng(seed))
        assert l1_to_linf_norm(a) == pytest.approx(float(np.max(np.diag(a.re))), rel=1e-12)
