"""Support bound c0, prefactor alpha0 and large-k behaviour of phi(Y**k).

For large k,

    phi(Y**k) ~ 2 alpha0 I_1(c0 k) / (c0 k)

with c0 = sigma sqrt(1 + sigma**2/4) + 2 asinh(sigma/2).  The saddle-point
evaluation of the binomial sum gives an independent route to c0 and is kept
as a cross-check only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .moments import as_sigma_sq
from .specfun import PrecisionContext, bessel_i1_ratio, default_context, lambert_w0, to_mpf

__all__ = [
    "AsymptoticConstants",
    "c0_of",
    "alpha0_of",
    "asymptotic_constants",
    "moment_asymptotic",
    "saddle_constants",
]


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants of the large-k moment asymptotics.

    ``kappa`` is the saddle location m0/k of the binomial sum and
    ``saddle_moment`` the saddle approximation of phi(Y**k) (None when the
    constants describe the k -> infinity limit or come from the closed form).
    """

    c0: object
    alpha0: object
    kappa: object
    sigma_sq: object
    k: float = math.inf
    saddle_moment: object = None

    def __post_init__(self):
        if not self.c0 > 0 or not self.alpha0 > 0:
            raise DomainError("c0 and alpha0 must be positive")
        if self.kappa is not None and not 0 < self.kappa < 1:
            raise DomainError("kappa must lie in (0, 1)")


def c0_of(sigma_sq=1, pc: PrecisionContext | None = None):
    """Support radius c0: |log Y| <= c0."""
    pc = pc or default_context()
    work = pc.guarded()
    ctx = work.mp
    s2 = to_mpf(as_sigma_sq(sigma_sq), work)
    sigma = ctx.sqrt(s2)
    val = sigma * ctx.sqrt(1 + s2 / 4) + 2 * ctx.asinh(sigma / 2)
    return pc.mp.mpf(val)


def alpha0_of(sigma_sq=1, pc: PrecisionContext | None = None):
    pc = pc or default_context()
    work = pc.guarded()
    ctx = work.mp
    s2 = to_mpf(as_sigma_sq(sigma_sq), work)
    c0 = c0_of(sigma_sq, work)
    val = c0 ** 1.5 / (2 * s2 ** ctx.mpf(0.75) * (4 + s2) ** ctx.mpf(0.25))
    return pc.mp.mpf(val)


def asymptotic_constants(sigma_sq=1, pc: PrecisionContext | None = None) -> AsymptoticConstants:
    """c0 and alpha0 from the closed forms; kappa from the saddle limit."""
    pc = pc or default_context()
    sad = saddle_constants(math.inf, pc, sigma_sq=sigma_sq)
    return AsymptoticConstants(
        c0=c0_of(sigma_sq, pc),
        alpha0=alpha0_of(sigma_sq, pc),
        kappa=sad.kappa,
        sigma_sq=as_sigma_sq(sigma_sq),
    )


def moment_asymptotic(k, sigma_sq=1, pc: PrecisionContext | None = None):
    """Leading large-k approximation 2 alpha0 I_1(c0 k)/(c0 k) of phi(Y**k)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    pc = pc or default_context()
    work = pc.guarded()
    c0 = c0_of(sigma_sq, work)
    a0 = alpha0_of(sigma_sq, work)
    return pc.mp.mpf(a0 * bessel_i1_ratio(c0 * k, work))


def saddle_constants(k=math.inf, pc: PrecisionContext | None = None, *, sigma_sq=1) -> AsymptoticConstants:
    """Saddle-point evaluation of the binomial moment sum.

    The dominant term sits at m0 = kappa k with
    kappa = W0(4 sigma_sq exp(2 - 4/k)) / 4, giving
    c0 = log 2 + (sigma_sq - 1)/2 + kappa + 2 kappa**2 and
    phi(Y**k) ~ exp(c0 k) / (k sqrt(2 pi (kappa + 1/4) k)).

    The binomial is replaced by its normal approximation, so the result is
    only trustworthy for sigma_sq near 1.  ``k = math.inf`` gives the limit.
    """
    pc = pc or default_context()
    work = pc.guarded()
    ctx = work.mp
    s2 = as_sigma_sq(sigma_sq)
    s2w = to_mpf(s2, work)
    if k == math.inf:
        arg = 4 * s2w * ctx.exp(2)
    else:
        if k < 1:
            raise DomainError("k must be >= 1 or math.inf")
        arg = 4 * s2w * ctx.exp(2 - ctx.mpf(4) / k)
    kappa = lambert_w0(arg, work) / 4
    c0 = ctx.log(2) + (s2w - 1) / 2 + kappa + 2 * kappa ** 2
    # prefactor matching 2 alpha0 I_1(c0 k)/(c0 k) ~ 2 alpha0 exp(c0 k)/(c0 k sqrt(2 pi c0 k))
    alpha0 = c0 ** 1.5 / (2 * ctx.sqrt(kappa + ctx.mpf(0.25)))
    moment = None
    if k != math.inf:
        moment = pc.mp.mpf(ctx.exp(c0 * k) / (k * ctx.sqrt(2 * ctx.pi * (kappa + ctx.mpf(0.25)) * k)))
    return AsymptoticConstants(
        c0=pc.mp.mpf(c0),
        alpha0=pc.mp.mpf(alpha0),
        kappa=pc.mp.mpf(kappa),
        sigma_sq=s2,
        k=k,
        saddle_moment=moment,
    )
