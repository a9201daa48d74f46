import math

import mpmath
import pytest

from freeclt.asymptotics import (
    AsymptoticConstants,
    alpha0_of,
    asymptotic_constants,
    c0_of,
    moment_asymptotic,
    saddle_constants,
)
from freeclt.errors import DomainError
from freeclt.moments import moment_y


def test_c0_unit_variance(pc):
    assert abs(c0_of(1, pc) - 2.0805) <= 5e-5


def test_c0_closed_form_at_unit_variance(pc):
    # sqrt(5)/2 + 2 log(1/2 + sqrt(5)/2)
    ctx = pc.mp
    want = ctx.sqrt(5) / 2 + 2 * ctx.log((1 + ctx.sqrt(5)) / 2)
    assert abs(c0_of(1, pc) - want) <= 4 * pc.eps


def test_c0_small_variance(pc):
    s2 = mpmath.mpf("1e-6")
    assert abs(c0_of(s2, pc) / (2 * mpmath.sqrt(s2)) - 1) < 1e-3


def test_c0_large_variance(pc):
    assert abs(c0_of(10 ** 6, pc) / (10 ** 6 / 2) - 1) < 1e-2


def test_c0_increasing(pc):
    grid = [mpmath.mpf(10) ** (e / 4) for e in range(-16, 17)]
    vals = [c0_of(s, pc) for s in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_alpha0_unit_variance(pc):
    assert abs(alpha0_of(1, pc) - 1.0034) <= 5e-4


def test_alpha0_small_variance(pc):
    assert abs(alpha0_of(mpmath.mpf("1e-8"), pc) - 1) < 1e-6


def test_alpha0_large_variance(pc):
    s = 10 ** 3
    assert abs(alpha0_of(s * s, pc) / (math.sqrt(2) * s / 8) - 1) < 1e-2


def test_asymptotic_moment_quality(pc):
    errs = {k: abs(moment_y(k, 1, pc) / moment_asymptotic(k, 1, pc) - 1) for k in (25, 50, 100, 200)}
    assert errs[100] <= 0.02
    assert errs[200] < errs[100] < errs[50] < errs[25]


def test_asymptotic_growth_rate(pc):
    k = 1000
    rate = pc.mp.log(moment_asymptotic(2 * k, 1, pc) / moment_asymptotic(k, 1, pc)) / k
    assert abs(rate - c0_of(1, pc)) < 2e-3


def test_scaled_moment_decreasing(pc):
    c0 = c0_of(1, pc)
    scaled = [moment_y(k, 1, pc) * pc.mp.exp(-c0 * k) for k in range(5, 120)]
    assert all(a > b for a, b in zip(scaled, scaled[1:]))


class TestSaddle:
    def test_kappa_limit(self, pc):
        assert abs(saddle_constants(math.inf, pc).kappa - 0.62) <= 0.005

    def test_c0_limit(self, pc):
        sad = saddle_constants(math.inf, pc)
        assert abs(sad.c0 - 2.0807) <= 1e-4
        assert abs(sad.c0 - c0_of(1, pc)) <= 3e-4

    def test_finite_k_approaches_limit(self, pc):
        lim = saddle_constants(math.inf, pc).kappa
        gaps = [abs(saddle_constants(k, pc).kappa - lim) for k in (10, 100, 1000)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_saddle_moment_has_right_growth(self, pc):
        # the normal approximation misses the prefactor but keeps the exponential rate
        r = [saddle_constants(k, pc).saddle_moment / moment_y(k, 1, pc) for k in (100, 200)]
        assert abs(pc.mp.log(r[1] / r[0]) / 100) < 2e-3

    def test_invalid_k(self, pc):
        with pytest.raises(DomainError):
            saddle_constants(0, pc)


def test_constants_bundle(pc):
    c = asymptotic_constants(1, pc)
    assert 0 < c.kappa < 1
    assert c.c0 == c0_of(1, pc)
    with pytest.raises(DomainError):
        AsymptoticConstants(c0=-1, alpha0=1, kappa=0.5, sigma_sq=1)
