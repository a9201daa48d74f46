"""Closed-form moments of the free multiplicative central limit Y and of log Y.

Y is the limit of products of n free copies of exp(v/sqrt(n)), with
phi(v) = 0 and phi(v**2) = sigma_sq.  Its k-th moment is

    phi(Y**k) = exp(sigma_sq k / 2) / k * L_{k-1}^{(1)}(-sigma_sq k)

and the even moments of log Y are polynomials in sigma_sq with rational
coefficients.  Reference moments of the semicircle and log-semicircle laws
live here too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, PrecisionError
from .specfun import (
    PrecisionContext,
    bessel_i1_ratio,
    catalan,
    default_context,
    hyp1f1,
    laguerre,
    stirling_first,
    to_mpf,
)

__all__ = [
    "ModelParams",
    "LogMomentPolynomial",
    "SemicircleLaw",
    "as_sigma_sq",
    "moment_y",
    "moment_y_laguerre",
    "moment_y_sum",
    "moment_y_sum_exact",
    "log_moment_poly",
    "log_moment",
    "log_moments_upto",
    "mgf_log_y",
    "semicircle_moment",
    "log_semicircle_moment",
    "semicircle_pdf",
    "semicircle_cdf",
]


def _exact(x):
    """Exact rational for int/Fraction/decimal strings; None for anything else."""
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class ModelParams:
    """Variance of log X_i.  Rational values keep every path exact."""

    sigma_sq: Fraction | float = Fraction(1)

    def __post_init__(self):
        v = _exact(self.sigma_sq)
        if v is not None:
            object.__setattr__(self, "sigma_sq", v)
        if not self.sigma_sq > 0:
            raise DomainError("sigma_sq must be positive")


def as_sigma_sq(params):
    """Accept a ModelParams or a bare number; rationals come back as Fraction."""
    if isinstance(params, ModelParams):
        return params.sigma_sq
    return ModelParams(params).sigma_sq


def _as_fraction(s2) -> Fraction:
    if isinstance(s2, Fraction):
        return s2
    if isinstance(s2, int):
        return Fraction(s2)
    # floats and mpf are dyadic rationals; convert exactly
    return Fraction(float(s2)) if not hasattr(s2, "_mpf_") else Fraction(*s2.as_integer_ratio())


# ---------------------------------------------------------------------------
# phi(Y**k)


def moment_y_sum_exact(k: int, sigma_sq) -> Fraction:
    """The finite sum sum_{m<k} (sigma_sq k)**m / m! * C(k, m+1) / k, exactly.

    phi(Y**k) is this value times exp(sigma_sq k / 2).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    s2 = _as_fraction(sigma_sq)
    p, q = s2.numerator, s2.denominator
    # common denominator q**(k-1) * (k-1)!
    fk1 = math.factorial(k - 1)
    num = 0
    pk = 1  # (p k)**m
    ratio = fk1  # (k-1)!/m!
    for m in range(k):
        num += pk * q ** (k - 1 - m) * math.comb(k, m + 1) * ratio
        pk *= p * k
        ratio //= m + 1
    return Fraction(num, q ** (k - 1) * fk1 * k)


def moment_y_sum(k: int, params=1, pc: PrecisionContext | None = None):
    """phi(Y**k) from the explicit sum over binomial coefficients."""
    pc = pc or default_context()
    s2 = as_sigma_sq(params)
    if k == 0:
        return pc.mp.one
    work = pc.guarded()
    val = to_mpf(moment_y_sum_exact(k, s2), work) * work.mp.exp(to_mpf(s2, work) * k / 2)
    return pc.mp.mpf(val)


def moment_y_laguerre(k: int, params=1, pc: PrecisionContext | None = None):
    """phi(Y**k) = exp(sigma_sq k/2)/k * L_{k-1}^{(1)}(-sigma_sq k)."""
    pc = pc or default_context()
    s2 = as_sigma_sq(params)
    if k == 0:
        return pc.mp.one
    work = pc.guarded()
    s2w = to_mpf(s2, work)
    lag = laguerre(k - 1, 1, -s2w * k, work)
    return pc.mp.mpf(work.mp.exp(s2w * k / 2) * lag / k)


def moment_y(k: int, params=1, pc: PrecisionContext | None = None, verify: bool = True):
    """k-th moment of the central limit Y.

    Evaluated by the Laguerre closed form; with ``verify`` (default) the
    explicit binomial sum is also evaluated and the two must agree to a
    relative 2**(16-bits), otherwise :class:`PrecisionError` is raised.
    ``k = 0`` gives 1.
    """
    if k < 0:
        raise DomainError("moment order must be nonnegative")
    pc = pc or default_context()
    value = moment_y_laguerre(k, params, pc)
    if verify and k > 0:
        other = moment_y_sum(k, params, pc)
        tol = pc.mp.ldexp(pc.mp.one, 16 - pc.bits)
        if abs(value - other) > tol * abs(other):
            raise PrecisionError(f"Laguerre and sum forms of phi(Y**{k}) disagree at {pc.bits} bits")
    return value


# ---------------------------------------------------------------------------
# phi(log**(2k) Y)


@dataclass(frozen=True)
class LogMomentPolynomial:
    """phi(log**(2k) Y) as an exact polynomial in sigma_sq.

    ``coeffs[p]`` is the coefficient of sigma_sq**p for k <= p <= 2k.
    """

    k: int
    coeffs: dict = field(default_factory=dict)

    @property
    def leading(self) -> Fraction:
        """Coefficient of the lowest power sigma_sq**k."""
        return self.coeffs.get(self.k, Fraction(0))

    @property
    def trailing(self) -> Fraction:
        """Coefficient of the highest power sigma_sq**(2k)."""
        return self.coeffs.get(2 * self.k, Fraction(0))

    def __call__(self, sigma_sq, pc: PrecisionContext | None = None):
        x = _exact(sigma_sq)
        if x is None:
            pc = pc or default_context()
            x = to_mpf(sigma_sq, pc)
            coef = {p: to_mpf(c, pc) for p, c in self.coeffs.items()}
            acc = pc.mp.zero
        else:
            coef = self.coeffs
            acc = Fraction(0)
        for p in range(2 * self.k, self.k - 1, -1):
            acc = acc * x + coef.get(p, 0)
        return acc * x ** self.k

    def __str__(self):
        parts = [f"{c}*s^{p}" for p, c in sorted(self.coeffs.items()) if c]
        return " + ".join(parts)


def _f_coeff(i: int) -> dict:
    """f_i of the 1F1 expansion as {power of sigma_sq: rational}."""
    if i == 0:
        return {0: Fraction(1)}
    out = {}
    for j in range((i + 1) // 2, i + 1):
        c = Fraction(stirling_first(j + 1, i + 1 - j), math.factorial(j) * math.factorial(j + 1))
        if c:
            out[j] = c
    return out


@lru_cache(maxsize=256)
def log_moment_poly(k: int) -> LogMomentPolynomial:
    """Exact polynomial for phi(log**(2k) Y).

    phi(log**(2k) Y) = (2k)! sum_i f_i sigma_sq**(2k-i) / (2**(2k-i) (2k-i)!),
    with f_i built from Stirling numbers of the first kind.  Odd log-moments
    vanish and are not represented.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    n = 2 * k
    total: dict[int, Fraction] = {}
    fact_n = math.factorial(n)
    for i in range(n + 1):
        scale = Fraction(fact_n, 2 ** (n - i) * math.factorial(n - i))
        for j, c in _f_coeff(i).items():
            p = j + n - i
            total[p] = total.get(p, Fraction(0)) + scale * c
    coeffs = {p: c for p, c in total.items() if c}
    if any(p < k or p > n for p in coeffs):
        raise ArithmeticError("log-moment polynomial has powers outside [k, 2k]")
    return LogMomentPolynomial(k, coeffs)


def log_moment(k: int, params=1, pc: PrecisionContext | None = None):
    """phi(log**(2k) Y); exact Fraction when sigma_sq is rational."""
    s2 = as_sigma_sq(params)
    return log_moment_poly(k)(s2, pc)


def log_moments_upto(kmax: int, sigma_sq) -> list[Fraction]:
    """phi(log**(2k) Y) for k = 1..kmax at a rational sigma_sq, exactly.

    Multiplies the power series of exp(sigma_sq s/2) and 1F1(1-s; 2; -sigma_sq s)
    in s directly, which is much cheaper than building each polynomial when a
    whole table is needed.
    """
    s2 = _as_fraction(sigma_sq)
    D = 2 * kmax
    hyp = [Fraction(0)] * (D + 1)
    poch = [Fraction(1)] + [Fraction(0)] * D  # (1-s)_j as a polynomial in s
    scale = Fraction(1)
    hyp[0] = Fraction(1)
    for j in range(1, D + 1):
        # poch <- poch * (j - s)
        for d in range(D - j + 1, 0, -1):
            poch[d] = j * poch[d] - poch[d - 1]
        poch[0] = j * poch[0]
        scale = scale * (-s2) / (j * (j + 1))
        for d in range(D - j + 1):
            if poch[d]:
                hyp[d + j] += scale * poch[d]
    half = s2 / 2
    ex = [Fraction(1)]
    for d in range(1, D + 1):
        ex.append(ex[-1] * half / d)
    out = []
    for k in range(1, kmax + 1):
        n = 2 * k
        c = sum((hyp[i] * ex[n - i] for i in range(n + 1)), Fraction(0))
        out.append(c * math.factorial(n))
    return out


def mgf_log_y(s, params=1, pc: PrecisionContext | None = None):
    """phi(Y**s) = exp(sigma_sq s/2) 1F1(1-s; 2; -sigma_sq s) for real s.

    Even in s; phi(Y**-k) is obtained as mgf_log_y(-k).
    """
    pc = pc or default_context()
    s2 = as_sigma_sq(params)
    if s == 0:
        return pc.mp.one
    work = pc.guarded()
    sw = to_mpf(s, work)
    s2w = to_mpf(s2, work)
    val = work.mp.exp(s2w * sw / 2) * hyp1f1(1 - sw, 2, -s2w * sw, work)
    return pc.mp.mpf(val)


# ---------------------------------------------------------------------------
# semicircle references


def semicircle_moment(k: int, R):
    """k-th moment of the semicircle law of radius R: (R/2)**(2m) C_m for k = 2m."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    if not R > 0:
        raise DomainError("radius must be positive")
    if k % 2:
        return 0 * R
    m = k // 2
    if isinstance(R, int):
        R = Fraction(R)
    return (R / 2) ** (2 * m) * catalan(m)


def log_semicircle_moment(k, R, pc: PrecisionContext | None = None):
    """phi(Z**k) = 2 I_1(kR)/(kR) for log-semicircular Z of radius R."""
    pc = pc or default_context()
    if not R > 0:
        raise DomainError("radius must be positive")
    if k < 0:
        raise DomainError("k must be nonnegative")
    return bessel_i1_ratio(to_mpf(k, pc) * to_mpf(R, pc), pc)


def semicircle_pdf(t, R):
    """Normalized semicircle density 2/(pi R**2) sqrt(R**2 - t**2) on [-R, R]."""
    if not R > 0:
        raise DomainError("radius must be positive")
    t = np.asarray(t, dtype=float)
    inside = np.clip(R * R - t * t, 0.0, None)
    out = 2.0 / (np.pi * R * R) * np.sqrt(inside)
    return out if out.ndim else float(out)


def semicircle_cdf(t, R):
    if not R > 0:
        raise DomainError("radius must be positive")
    u = np.clip(np.asarray(t, dtype=float) / R, -1.0, 1.0)
    out = 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SemicircleLaw:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("radius must be positive")

    def pdf(self, t):
        return semicircle_pdf(t, self.radius)

    def cdf(self, t):
        return semicircle_cdf(t, self.radius)

    def moment(self, k):
        return semicircle_moment(k, self.radius)
