import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from adq.errors import ConvergenceError, DomainError, RangeError
from adq.specfun import (
    abel_sum,
    extrapolate_to_zero,
    gauss_jacobi,
    hyp2f1_terminating,
    hyp3f2_terminating,
    jacobi_all,
    jacobi_negative_upper,
    jacobi_poly,
    jacobi_sequence,
    jacobi_table,
    pochhammer,
    richardson_tail,
    tail_powers,
)

exponent = st.floats(-0.9, 4.0)


class TestPochhammer:
    @pytest.mark.parametrize("a,n,expected", [(4, 0, 1.0), (4, 3, 120.0), (1.5, 2, 3.75)])
    def test_examples(self, a, n, expected):
        assert pochhammer(a, n) == pytest.approx(expected, rel=1e-15)

    @given(st.floats(0.1, 30), st.integers(0, 80))
    def test_matches_scipy(self, a, n):
        assert pochhammer(a, n) == pytest.approx(special.poch(a, n), rel=1e-11)

    def test_negative_integer_start_vanishes(self):
        assert pochhammer(-3, 5) == 0.0
        assert pochhammer(-3, 3) == pytest.approx(-6.0)

    def test_overflow_raises(self):
        with pytest.raises(RangeError):
            pochhammer(50.0, 200)

    def test_rejects_fractional_length(self):
        with pytest.raises(DomainError):
            pochhammer(1.0, 2.5)


class TestJacobi:
    def test_degree_zero_is_one(self):
        assert jacobi_poly(0, 0.3, 1.7, 0.2) == 1.0

    def test_value_at_one(self):
        assert jacobi_poly(1, 0.0, 3.0, 1.0) == pytest.approx(1.0)

    def test_against_terminating_series(self):
        # P_n^(a,b)(x) = (a+1)_n / n! 2F1(-n, n+a+b+1; a+1; (1-x)/2)
        val = math.comb(2, 2) * hyp2f1_terminating(2, 2 + 0 + 3 + 1, 1.0, 0.5)
        assert jacobi_poly(2, 0.0, 3.0, 0.0) == pytest.approx(val, rel=1e-14)

    @given(st.integers(0, 25), exponent, exponent, st.floats(-1, 1))
    def test_matches_scipy(self, n, a, b, x):
        ref = special.eval_jacobi(n, a, b, x)
        assert jacobi_poly(n, a, b, x) == pytest.approx(ref, rel=1e-10, abs=1e-10 * max(1.0, abs(ref)))

    @given(st.integers(0, 15), exponent, exponent, st.floats(-1, 1))
    def test_reflection(self, n, a, b, x):
        assert jacobi_poly(n, a, b, -x) == pytest.approx((-1) ** n * jacobi_poly(n, b, a, x), rel=1e-10, abs=1e-10)

    def test_batch_forms_agree(self):
        x = np.linspace(-1, 1, 7)
        full = jacobi_all(12, 1.5, 0.5, x)
        table = jacobi_table(12, [1.5, 2.0], 0.5, x)
        assert np.allclose(table[:, 0, :], full, rtol=1e-14)
        seq = jacobi_sequence(12, 1.5, 0.5, 0.3)
        assert np.allclose(seq, jacobi_all(12, 1.5, 0.5, 0.3), rtol=1e-14)

    def test_degenerate_recurrence_falls_back(self):
        # alpha + beta = -2 makes a recurrence coefficient vanish
        x = np.linspace(-0.9, 0.9, 5)
        n, a, b = 4, -1.0, -1.0
        ref = sum(
            special.binom(n + a, n - s) * special.binom(n + b, s) * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s)
            for s in range(n + 1)
        )
        assert np.allclose(jacobi_all(n, a, b, x)[n], ref, atol=1e-12)


class TestNegativeUpper:
    def test_zero_shift_is_identity(self):
        assert jacobi_negative_upper(2, 0, 3.0, 0.4) == pytest.approx(jacobi_poly(2, 0.0, 3.0, 0.4))

    @pytest.mark.parametrize("n,a,beta,x", [(2, 1, 3.0, 0.3), (3, 2, 2.0, 0.5), (5, 3, 1.5, -0.2), (6, 6, 0.5, 0.7)])
    def test_matches_limit(self, n, a, beta, x):
        ref = special.eval_jacobi(n, -a + 1e-9, beta, x)
        assert jacobi_negative_upper(n, a, beta, x) == pytest.approx(ref, rel=1e-6, abs=1e-8)

    def test_bare_first_power_is_wrong_for_shift_two(self):
        n, a, beta, x = 3, 2, 2.0, 0.5
        good = jacobi_negative_upper(n, a, beta, x)
        bare = good / ((x - 1) / 2) ** a * ((x - 1) / 2)
        assert abs(bare - special.eval_jacobi(n, -a + 1e-9, beta, x)) > 1e-3

    def test_shift_beyond_degree(self):
        with pytest.raises(DomainError):
            jacobi_negative_upper(2, 3, 1.0, 0.0)


class TestHypergeometric:
    def test_examples(self):
        assert hyp2f1_terminating(0, 2.0, 3.0, 0.7) == 1.0
        assert hyp2f1_terminating(1, 5.0, 1.0, 0.2) == pytest.approx(0.0, abs=1e-16)
        assert hyp3f2_terminating(0, 1, 2, 3, 4) == 1.0
        p2, p3, q1, q2 = 4.5, 2.0, 1.0, 3.5
        assert hyp3f2_terminating(1, p2, p3, q1, q2) == pytest.approx(1 - p2 * p3 / (q1 * q2))

    @given(st.integers(0, 12), st.floats(0.5, 10), st.floats(0.5, 5), st.floats(-1, 1))
    def test_2f1_matches_scipy(self, n, b, c, x):
        ref = special.hyp2f1(-n, b, c, x)
        assert hyp2f1_terminating(n, b, c, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1, abs(ref)))

    def test_pole_raises(self):
        with pytest.raises(DomainError):
            hyp2f1_terminating(3, 1.0, -1.0, 0.5)
        with pytest.raises(DomainError):
            hyp3f2_terminating(3, 1.0, 1.0, -2.0, 1.0)

    def test_diagonal_matrix_element_form(self):
        # 2F1(-n, n + 2 eta; 1; u) = P_n^(0, 2 eta - 1)(1 - 2u)
        eta, u = 1.7, 0.3
        for n in range(8):
            assert hyp2f1_terminating(n, n + 2 * eta, 1.0, u) == pytest.approx(jacobi_poly(n, 0.0, 2 * eta - 1, 1 - 2 * u), rel=1e-12)


class TestGaussJacobi:
    def test_single_node(self):
        q = gauss_jacobi(1, 0.0, 0.0)
        assert q.nodes[0] == pytest.approx(0.0, abs=1e-16)
        assert q.weights[0] == pytest.approx(2.0)

    @given(st.integers(1, 60), exponent, exponent)
    def test_matches_scipy(self, order, a, b):
        q = gauss_jacobi(order, a, b)
        x, w = special.roots_jacobi(order, a, b)
        assert np.allclose(q.nodes, x, atol=1e-12)
        assert np.allclose(q.weights, w, rtol=1e-9, atol=1e-14 * w.max())

    @given(st.integers(1, 40), exponent, exponent)
    def test_invariants(self, order, a, b):
        q = gauss_jacobi(order, a, b)
        assert np.all(np.diff(q.nodes) > 0)
        assert np.all(np.abs(q.nodes) < 1)
        assert np.all(q.weights > 0)
        assert q.order == order

    def test_large_exponent_uses_log_mass(self):
        q = gauss_jacobi(8, 1200.0, 2.0)
        assert q.unit_weights.sum() == pytest.approx(1.0, rel=1e-13)
        ref = 1203 * math.log(2) + special.gammaln(1201) + special.gammaln(3) - special.gammaln(1204)
        assert q.log_mass == pytest.approx(ref, rel=1e-13)
        with pytest.raises(ConvergenceError):
            q.weights

    def test_polynomial_exact(self):
        # (1-v)(1+v)^2 v^5 = v^5 + v^6 - v^7 - v^8 integrates to 2/7 - 2/9
        q = gauss_jacobi(3, 1.0, 2.0)
        assert q.integrate(lambda v: v**5) == pytest.approx(4 / 63, rel=1e-14)

    def test_orthogonality_of_squares(self):
        # (1+v)^(2 eta-2) P_n^(0, 2 eta-1)(v)^2 integrates to 2^(2 eta-1)/(2 eta-1)
        eta = 1.75
        q = gauss_jacobi(20, 0.0, 2 * eta - 2)
        P = jacobi_all(10, 0.0, 2 * eta - 1, q.nodes)
        vals = (P**2) @ q.weights
        assert np.allclose(vals, 2 ** (2 * eta - 1) / (2 * eta - 1), rtol=1e-12)

    def test_rejects_bad_exponents(self):
        with pytest.raises(DomainError):
            gauss_jacobi(4, -1.0, 0.0)
        with pytest.raises(DomainError):
            gauss_jacobi(0, 0.0, 0.0)


class TestSummation:
    def test_alternating_ones(self):
        assert abel_sum(lambda n: (-1.0) ** n).value == pytest.approx(0.5, abs=1e-10)

    def test_alternating_linear(self):
        assert abel_sum(lambda n: 2.0 * n * (-1.0) ** n).value == pytest.approx(-0.5, abs=1e-6)

    def test_convergent_within_error(self):
        res = abel_sum(lambda n: 0.5**n)
        assert abs(res.value - 2.0) <= max(res.error, 1e-9)

    def test_coefficient_table(self):
        coeffs = (-1.0) ** np.arange(400_000)
        assert abel_sum(coeffs, (0.9, 0.95, 0.99, 0.995)).value == pytest.approx(0.5, abs=1e-6)

    def test_short_table_raises(self):
        with pytest.raises(ConvergenceError):
            abel_sum((-1.0) ** np.arange(50))

    def test_unreliable_raises(self):
        # the generating function varies on the scale 1 - t ~ 0.002, finer than the ladder
        with pytest.raises(ConvergenceError, match="unreliable"):
            abel_sum(lambda n: np.cos(0.002 * n))

    def test_bad_ladder(self):
        with pytest.raises(DomainError):
            abel_sum(lambda n: 0.5**n, (0.5, 1.0))

    def test_extrapolate_polynomial_exact(self):
        h = [0.4, 0.2, 0.1, 0.05]
        vals = [3 + 2 * x - x**2 for x in h]
        val, res = extrapolate_to_zero(h, vals)
        assert val == pytest.approx(3.0, abs=1e-13)

    def test_richardson_tail(self):
        K = np.arange(1, 4097)
        partial = np.cumsum(1.0 / K**3)
        cut = [256, 512, 1024, 2048, 4096]
        lim, err = richardson_tail(partial[np.array(cut) - 1], cut, 2.0)
        assert lim == pytest.approx(special.zeta(3), abs=1e-13)
        assert err < 1e-10

    def test_tail_powers_merge(self):
        assert list(tail_powers([1.0, 1.5], 4)) == [1.0, 1.5, 2.0, 2.5]
        assert list(tail_powers([1.0, 1.0], 3)) == [1.0, 2.0, 3.0]
