from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from freeclt.asymptotics import alpha0_of, c0_of
from freeclt.errors import DomainError
from freeclt.moments import (
    LogMomentPolynomial,
    ModelParams,
    SemicircleLaw,
    log_moment,
    log_moment_poly,
    log_moments_upto,
    log_semicircle_moment,
    mgf_log_y,
    moment_y,
    moment_y_laguerre,
    moment_y_sum,
    moment_y_sum_exact,
    semicircle_cdf,
    semicircle_moment,
    semicircle_pdf,
)
from freeclt.specfun import PrecisionContext, catalan, to_mpf
from oracles import log_moment_quadrature, moment_y_mpmath, moment_y_rational_part

F = Fraction


def close(a, b, rtol):
    return abs(a - b) <= rtol * abs(b)


class TestParams:
    def test_rational_kept_exact(self):
        assert ModelParams("1/4").sigma_sq == F(1, 4)
        assert ModelParams(2).sigma_sq == F(2)

    @pytest.mark.parametrize("bad", [0, -1, F(-1, 3)])
    def test_positive(self, bad):
        with pytest.raises(DomainError):
            ModelParams(bad)


class TestMomentY:
    def test_first(self, pc):
        assert close(moment_y(1, 1, pc), pc.mp.exp(0.5), 2 * pc.eps)
        assert mpmath.nstr(moment_y(1, 1, pc), 11) == "1.6487212707"

    def test_second(self, pc):
        assert close(moment_y(2, 1, pc), 2 * pc.mp.e, 2 * pc.eps)

    def test_third(self, pc):
        # (3 + 9 + 4.5)/3 e**1.5
        assert moment_y_sum_exact(3, 1) == F(11, 2)
        assert mpmath.nstr(moment_y(3, 1, pc), 9) == "24.6492899"

    def test_zeroth(self, pc):
        assert moment_y(0, 1, pc) == 1

    @pytest.mark.parametrize("s2", [F(1, 4), F(1), F(4)])
    @pytest.mark.parametrize("k", [1, 2, 7, 30, 75, 200])
    def test_exact_sum_matches_laguerre_oracle(self, s2, k):
        assert moment_y_sum_exact(k, s2) == moment_y_rational_part(k, s2)

    @pytest.mark.parametrize("s2", [F(1, 4), F(1), F(4)])
    def test_two_forms_agree(self, pc, s2):
        tol = 2 ** (16 - pc.bits)
        for k in list(range(1, 40)) + [100, 150, 200]:
            assert close(moment_y_laguerre(k, s2, pc), moment_y_sum(k, s2, pc), tol)

    def test_against_mpmath(self, pc):
        for k in (5, 60):
            assert close(moment_y(k, F(1, 4), pc), moment_y_mpmath(k, F(1, 4)), 2 ** -200)

    def test_root_growth_rate(self, pc):
        c0 = c0_of(1, pc)
        a0 = alpha0_of(1, pc)
        roots = [moment_y(k, 1, pc) ** (pc.mp.one / k) for k in range(10, 201, 10)]
        assert all(a < b < pc.mp.exp(c0) for a, b in zip(roots, roots[1:]))
        # after removing the k**-1.5 prefactor, the exponential rate is c0
        k = 200
        pref = 2 * a0 / (c0 * pc.mp.sqrt(2 * pc.mp.pi * c0))
        rate = (pc.mp.log(moment_y(k, 1, pc) / pref) + 1.5 * pc.mp.log(k)) / k
        assert abs(rate - c0) < 1e-3


class TestLogMomentPoly:
    def test_k1(self):
        assert log_moment_poly(1).coeffs == {1: F(1), 2: F(1, 12)}

    def test_k2(self):
        assert log_moment_poly(2).coeffs == {2: F(2), 3: F(1, 3), 4: F(1, 80)}

    def test_k3(self):
        assert log_moment_poly(3).coeffs == {3: F(5), 4: F(5, 4), 5: F(23, 240), 6: F(1, 448)}

    @pytest.mark.parametrize("k", range(1, 13))
    def test_catalan_and_uniform_coefficients(self, k):
        p = log_moment_poly(k)
        assert p.leading == catalan(k)
        assert p.trailing == F(1, (2 * k + 1) * 4 ** k)
        assert set(p.coeffs) <= set(range(k, 2 * k + 1))

    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_against_mgf_derivative(self, k):
        got = log_moment(k, F(3, 2))
        ref = log_moment_quadrature(k, 1.5)
        assert abs(float(got) - float(ref)) < 1e-10 * float(got)

    def test_table_matches_polynomials(self):
        for s2 in (F(1), F(2, 7)):
            table = log_moments_upto(25, s2)
            assert table == [log_moment(k, s2) for k in range(1, 26)]

    def test_value_at_one(self):
        assert log_moment(1, 1) == F(13, 12)

    def test_small_variance_leading_term(self):
        s2 = F(1, 10 ** 8)
        assert abs(log_moment(1, s2) / s2 - 1) < 1e-7

    def test_large_variance_uniform_limit(self):
        # the uniform-law approximation is only asymptotic; at sigma_sq = 64 the
        # Catalan and middle terms still add 46% to the 4th log-moment
        s2 = F(64)
        exact = 2 * s2 ** 2 + s2 ** 3 / 3 + s2 ** 4 / 80
        assert log_moment(2, s2) == exact
        ratio = exact / (F(1, 5) * (s2 / 2) ** 4)
        assert abs(float(ratio) - 1.4557) < 1e-4
        ratios = [log_moment(2, s) / (F(1, 5) * (s / 2) ** 4) for s in (F(64), F(10 ** 3), F(10 ** 5))]
        assert ratios[0] > ratios[1] > ratios[2] > 1

    def test_float_evaluation(self, pc):
        p = log_moment_poly(3)
        assert close(p(0.5, pc), to_mpf(p(F(1, 2)), pc), 4 * pc.eps)

    def test_str(self):
        assert str(log_moment_poly(1)) == "1*s^1 + 1/12*s^2"

    def test_domain(self):
        with pytest.raises(DomainError):
            log_moment_poly(0)


class TestMgf:
    def test_zero(self, pc):
        assert mgf_log_y(0, 1, pc) == 1

    @pytest.mark.parametrize("k", range(1, 11))
    def test_integer_points_are_moments(self, pc, k):
        assert close(mgf_log_y(k, 1, pc), moment_y(k, 1, pc), 2 ** (16 - pc.bits))

    @pytest.mark.parametrize("s", [0.3, 1.7, 4.2])
    def test_even(self, pc, s):
        assert close(mgf_log_y(s, 1, pc), mgf_log_y(-s, 1, pc), 2 ** (16 - pc.bits))

    def test_negative_moment(self, pc):
        assert close(mgf_log_y(-2, 1, pc), 2 * pc.mp.e, 2 ** (16 - pc.bits))

    @given(st.floats(min_value=-8, max_value=8), st.sampled_from([F(1, 4), F(1), F(4)]))
    @settings(max_examples=40, deadline=None)
    def test_evenness_property(self, s, s2):
        pc = PrecisionContext(128)
        assert close(mgf_log_y(s, s2, pc), mgf_log_y(-s, s2, pc), 2 ** (16 - 128))


class TestSemicircle:
    def test_odd_moments(self):
        assert semicircle_moment(3, 2) == 0

    def test_catalan_moment(self):
        assert semicircle_moment(4, 2) == 2

    def test_matches_leading_log_moment(self):
        s2 = F(9, 4)
        assert semicircle_moment(2, 2 * F(3, 2)) == s2 == log_moment_poly(1).leading * s2

    def test_pdf_edges(self):
        assert semicircle_pdf(2.5, 2.5) == 0
        assert semicircle_pdf(-2.5, 2.5) == 0
        assert semicircle_pdf(3.0, 2.5) == 0

    @pytest.mark.parametrize("R", [0.5, 2.0805, 7.0])
    def test_pdf_unit_mass(self, R):
        mass, _ = integrate.quad(lambda t: semicircle_pdf(t, R), -R, R, epsabs=1e-13, epsrel=1e-13)
        assert abs(mass - 1) < 1e-10

    def test_second_moment_by_quadrature(self):
        R = 3.0
        m2, _ = integrate.quad(lambda t: t * t * semicircle_pdf(t, R), -R, R, epsabs=1e-13)
        assert abs(m2 - (R / 2) ** 2 * catalan(1)) < 1e-10

    def test_cdf_consistent_with_pdf(self):
        R = 2.0
        t = np.linspace(-R, R, 9)
        num = [integrate.quad(lambda u: semicircle_pdf(u, R), -R, x)[0] for x in t]
        assert np.allclose(semicircle_cdf(t, R), num, atol=1e-10)

    def test_law_wrapper(self):
        law = SemicircleLaw(2.0)
        assert law.moment(2) == 1
        with pytest.raises(DomainError):
            SemicircleLaw(0)


class TestLogSemicircle:
    def test_small_k_limit(self, pc):
        assert abs(log_semicircle_moment(1e-20, 1, pc) - 1) < 1e-30

    def test_i1_of_two(self, pc):
        assert mpmath.nstr(log_semicircle_moment(1, 2, pc), 8) == "1.5906369"

    def test_ratio_to_moment_tends_to_inverse_alpha0(self, pc):
        c0 = c0_of(1, pc)
        target = 1 / alpha0_of(1, pc)
        ratios = [log_semicircle_moment(k, c0, pc) / moment_y(k, 1, pc) for k in (25, 100, 400)]
        gaps = [abs(r - target) for r in ratios]
        assert gaps[0] > gaps[1] > gaps[2]
        assert abs(ratios[-1] - 0.9966) < 1e-4
