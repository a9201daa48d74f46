"""Implied radii: the log-semicircle / semicircle radius matching each moment.

For the y-kind curve, r_k solves 2 I_1(k r)/(k r) = phi(Y**k).  For the
log-kind curve, r_k solves C_k (r/2)**(2k) = phi(log**(2k) Y), the
semicircle law's 2k-th moment; ``catalan_double_index=True`` switches to the
literal C_{2k} index for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .asymptotics import c0_of
from .errors import ConvergenceError, DomainError
from .moments import as_sigma_sq, log_moment, log_moments_upto, moment_y
from .specfun import PrecisionContext, bessel_i, bessel_i1_ratio, catalan, default_context, to_mpf

__all__ = ["RadiusCurve", "implied_radius_y", "implied_radius_log", "radius_curve"]

KINDS = ("y", "log")


@dataclass(frozen=True)
class RadiusCurve:
    kind: str
    points: tuple  # ((k, r_k), ...)
    sigma_sq: object
    monotone_decreasing: bool

    @property
    def span(self):
        """r_1 - r_kmax."""
        return self.points[0][1] - self.points[-1][1]

    def radii(self):
        return [r for _, r in self.points]


def implied_radius_y(k: int, sigma_sq=1, pc: PrecisionContext | None = None, *, target=None):
    """Radius r > 0 with 2 I_1(k r)/(k r) = phi(Y**k).

    Newton's method on log(2 I_1(x)/x) in x = k r, whose derivative is
    I_2(x)/I_1(x), safeguarded by bisection on the bracket
    [1e-6, 64 sigma_sq + 8].  The objective is strictly increasing in r, so
    the root is unique; monotonicity at the bracket ends is checked.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    pc = pc or default_context()
    work = pc.guarded()
    ctx = work.mp
    s2 = as_sigma_sq(sigma_sq)
    tgt = to_mpf(target, work) if target is not None else moment_y(k, s2, work)
    log_t = ctx.log(tgt)

    def g(r):
        return ctx.log(bessel_i1_ratio(k * r, work)) - log_t

    lo, hi = ctx.mpf("1e-6"), 64 * to_mpf(s2, work) + 8
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo < 0 < g_hi):
        raise ConvergenceError(f"target moment for k={k} not bracketed by [{lo}, {hi}]")
    mid = (lo + hi) / 2
    if not g_lo < g(mid) < g_hi:
        raise ConvergenceError("objective is not increasing on the bracket")

    r = c0_of(s2, work)
    if not lo < r < hi:
        r = mid
    tol = ctx.ldexp(ctx.one, -(pc.bits + 4))
    for _ in range(400):
        val = g(r)
        if val == 0:
            break
        if val < 0:
            lo = r
        else:
            hi = r
        x = k * r
        slope = k * bessel_i(2, x, work) / bessel_i(1, x, work)
        step = val / slope
        new = r - step
        if not lo < new < hi:
            new = (lo + hi) / 2
        if abs(new - r) <= tol * abs(r):
            r = new
            break
        r = new
    else:
        raise ConvergenceError(f"implied radius for k={k} did not converge")

    resid = abs(bessel_i1_ratio(k * r, work) - tgt)
    if resid > ctx.ldexp(tgt, -40):
        raise ConvergenceError(f"implied radius residual {float(resid):.3g} too large for k={k}")
    return pc.mp.mpf(r)


def implied_radius_log(k: int, sigma_sq=1, pc: PrecisionContext | None = None, *,
                       catalan_double_index: bool = False, moment=None):
    """r = 2 (phi(log**(2k) Y) / C)**(1/(2k)) with C = C_k (or C_{2k} with the doubled index)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    pc = pc or default_context()
    m = moment if moment is not None else log_moment(k, sigma_sq)
    c = catalan(2 * k if catalan_double_index else k)
    val = to_mpf(m, pc) / c
    return 2 * val ** (pc.mp.one / (2 * k))


def radius_curve(kind: str, k_max: int, sigma_sq=1, pc: PrecisionContext | None = None, *,
                 catalan_double_index: bool = False) -> RadiusCurve:
    """Implied radii for k = 1..k_max, with a monotone-decrease check."""
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    pc = pc or default_context()
    s2 = as_sigma_sq(sigma_sq)
    points = []
    if kind == "y":
        for k in range(1, k_max + 1):
            points.append((k, implied_radius_y(k, s2, pc)))
    else:
        moments = log_moments_upto(k_max, s2)
        for k, m in enumerate(moments, start=1):
            points.append((k, implied_radius_log(k, s2, pc, catalan_double_index=catalan_double_index, moment=m)))
    radii = [r for _, r in points]
    mono = all(a >= b for a, b in zip(radii, radii[1:]))
    return RadiusCurve(kind, tuple(points), s2, mono)
