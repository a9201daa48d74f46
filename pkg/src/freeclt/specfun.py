"""Arbitrary-precision special functions and exact combinatorial numbers.

Big-float arithmetic is done with :mod:`mpmath`, but every function here
evaluates its own series or recurrence; mpmath's library implementations are
only used by the test-suite as independent oracles.

Each :class:`PrecisionContext` owns a private ``mpmath.MPContext`` so that no
function touches mpmath's global precision.  Values returned for a context
``pc`` are mpf numbers bound to ``pc.mp``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

from .errors import DomainError

__all__ = [
    "DEFAULT_BITS",
    "MONOTONE_BITS",
    "PrecisionContext",
    "default_context",
    "to_mpf",
    "laguerre",
    "bessel_i",
    "bessel_i1_ratio",
    "lambert_w0",
    "StirlingTable",
    "stirling_first",
    "catalan",
    "hyp1f1",
]

DEFAULT_BITS = 256
MONOTONE_BITS = 1024

# extra working bits used internally before rounding to the caller's precision
GUARD_BITS = 32


@lru_cache(maxsize=None)
def _mp_context(bits: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """Binary precision for big-float evaluation.

    Parameters
    ----------
    bits : int
        Mantissa bits, at least 64.
    """

    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 64:
            raise DomainError(f"precision must be an integer >= 64 bits, got {self.bits!r}")

    @property
    def mp(self) -> mpmath.MPContext:
        return _mp_context(self.bits)

    @property
    def eps(self):
        """2**-bits as an mpf of this context."""
        return self.mp.ldexp(self.mp.one, -self.bits)

    def guarded(self, extra: int = GUARD_BITS) -> "PrecisionContext":
        return PrecisionContext(self.bits + int(extra))

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits)

    def mpf(self, value):
        return to_mpf(value, self)


def default_context() -> PrecisionContext:
    return PrecisionContext(DEFAULT_BITS)


def to_mpf(value, pc: PrecisionContext):
    """Convert int, Fraction, float, str or mpf to an mpf of ``pc``."""
    ctx = pc.mp
    if isinstance(value, Fraction) or (
        isinstance(value, Rational) and not isinstance(value, int)
    ):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# Laguerre polynomials


def laguerre(n: int, alpha, x, pc: PrecisionContext | None = None):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by the ascending recurrence.

    ``(k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}``

    When ``pc`` is None and both ``alpha`` and ``x`` are int or Fraction the
    result is an exact :class:`~fractions.Fraction`; otherwise it is an mpf of
    ``pc`` (default precision if omitted).  The recurrence is well conditioned
    for ``x < 0``, the only regime the moment formulas need.
    """
    if n < 0:
        raise DomainError("laguerre degree must be nonnegative")
    if pc is None and _is_exact(alpha) and _is_exact(x):
        a, t = Fraction(alpha), Fraction(x)
        one = Fraction(1)
    else:
        pc = pc or default_context()
        work = pc.guarded()
        a, t = to_mpf(alpha, work), to_mpf(x, work)
        one = work.mp.one
    prev, cur = one, 1 + a - t
    if n == 0:
        result = prev
    else:
        for k in range(1, n):
            prev, cur = cur, ((2 * k + 1 + a - t) * cur - (k + a) * prev) / (k + 1)
        result = cur
    if isinstance(result, Fraction):
        return result
    return pc.mp.mpf(result)


# ---------------------------------------------------------------------------
# modified Bessel function of the first kind


def _bessel_series(nu: int, x, pc: PrecisionContext):
    """Sum_m (x/2)^(2m) / (m! (m+nu)!) at guarded precision (no (x/2)^nu factor)."""
    work = pc.guarded()
    ctx = work.mp
    q = to_mpf(x, work) / 2
    q2 = q * q
    term = ctx.one / math.factorial(nu)
    total = term
    tol = ctx.ldexp(ctx.one, -(pc.bits + 16))
    m = 0
    # all terms are positive; stop once past the peak and below tolerance
    while True:
        m += 1
        term = term * q2 / (m * (m + nu))
        total += term
        if m > q and term < tol * total:
            break
    return total, q, work


def bessel_i(nu: int, x, pc: PrecisionContext | None = None):
    """Modified Bessel function I_nu(x) for integer ``nu >= 0`` and ``x >= 0``."""
    pc = pc or default_context()
    if nu < 0 or int(nu) != nu:
        raise DomainError("bessel_i supports nonnegative integer order only")
    if x < 0:
        raise DomainError("bessel_i requires x >= 0")
    if x == 0:
        return pc.mp.one if nu == 0 else pc.mp.zero
    total, q, work = _bessel_series(int(nu), x, pc)
    return pc.mp.mpf(total * q ** int(nu))


def bessel_i1_ratio(x, pc: PrecisionContext | None = None):
    """The combination 2 I_1(x)/x, equal to 1 at x = 0."""
    pc = pc or default_context()
    if x < 0:
        raise DomainError("bessel_i1_ratio requires x >= 0")
    if x == 0:
        return pc.mp.one
    total, _, _ = _bessel_series(1, x, pc)
    return pc.mp.mpf(total)


# ---------------------------------------------------------------------------
# Lambert W, principal branch


def lambert_w0(x, pc: PrecisionContext | None = None):
    """Principal branch W0 of the Lambert W function, ``x >= -1/e``.

    Halley iteration started from the branch-point series near -1/e and
    from Winitzki's logarithmic approximation elsewhere.
    """
    pc = pc or default_context()
    work = pc.guarded()
    ctx = work.mp
    xv = to_mpf(x, work)
    if xv == 0:
        return pc.mp.zero
    gap = xv + ctx.exp(-1)
    if gap < 0:
        # tolerate the rounding of -1/e to a float argument
        if -gap <= ctx.ldexp(ctx.one, -52):
            return -pc.mp.one
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if gap == 0:
        return -pc.mp.one

    if xv < -0.25:
        p = ctx.sqrt(2 * ctx.e * gap)
        w = -1 + p - p * p / 3 + 11 * p ** 3 / 72
    else:
        lx = ctx.log1p(xv)
        w = lx * (1 - ctx.log1p(lx) / (2 + lx))

    tol = ctx.ldexp(ctx.one, -(pc.bits + 8))
    for _ in range(200):
        ew = ctx.exp(w)
        f = w * ew - xv
        wp1 = w + 1
        if wp1 == 0:
            break
        step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
        w -= step
        if abs(step) <= tol * max(abs(w), tol):
            break
    return pc.mp.mpf(w)


# ---------------------------------------------------------------------------
# exact combinatorics


class StirlingTable:
    """Signed Stirling numbers of the first kind, memoized up to ``n_max``.

    Rows are built with s(n+1, k) = s(n, k-1) - n s(n, k).  Rows beyond
    ``n_max`` are computed on demand and not stored.
    """

    def __init__(self, n_max: int = 128):
        self.n_max = n_max
        self._rows = [[1]]  # row 0: s(0, 0) = 1
        self._lock = threading.Lock()

    @staticmethod
    def _next_row(row, n):
        # row holds s(n, 0..n); returns s(n+1, 0..n+1)
        new = [0] * (n + 2)
        for k in range(1, n + 2):
            left = row[k - 1]
            right = row[k] if k <= n else 0
            new[k] = left - n * right
        return new

    def row(self, n: int) -> list[int]:
        if n <= self.n_max:
            with self._lock:
                while len(self._rows) <= n:
                    m = len(self._rows) - 1
                    self._rows.append(self._next_row(self._rows[m], m))
                return self._rows[n]
        row = self.row(self.n_max)
        for m in range(self.n_max, n):
            row = self._next_row(row, m)
        return row

    def __call__(self, n: int, k: int) -> int:
        if n < 1 or k < 1 or k > n:
            raise DomainError(f"stirling_first requires 1 <= k <= n, got n={n}, k={k}")
        return self.row(n)[k]


_STIRLING = StirlingTable()


def stirling_first(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s(n, k), ``1 <= k <= n``."""
    return _STIRLING(n, k)


def catalan(k: int) -> int:
    if k < 0:
        raise DomainError("catalan index must be nonnegative")
    return math.comb(2 * k, k) // (k + 1)


# ---------------------------------------------------------------------------
# confluent hypergeometric 1F1


def _nonpositive_int(v) -> bool:
    return v <= 0 and v == int(v)


def hyp1f1(a, b, z, pc: PrecisionContext | None = None):
    """Kummer's confluent hypergeometric function 1F1(a; b; z).

    Terminates when ``a`` is a nonpositive integer.  Otherwise the series is
    summed until 32 consecutive terms fall below 2**-(bits+16) of the running
    sum.  Extra working bits proportional to |z| absorb the cancellation of the
    alternating series for negative ``z``.
    """
    pc = pc or default_context()
    if _nonpositive_int(b):
        raise DomainError(f"hyp1f1 undefined for nonpositive integer b={b}")
    zf = float(z)
    extra = GUARD_BITS + int(math.ceil(2 * abs(zf) * math.log2(math.e)))
    work = pc.guarded(extra)
    ctx = work.mp
    av, bv, zv = to_mpf(a, work), to_mpf(b, work), to_mpf(z, work)
    term = ctx.one
    total = ctx.one
    if _nonpositive_int(a):
        for m in range(int(-a)):
            term = term * (av + m) * zv / ((bv + m) * (m + 1))
            total += term
        return pc.mp.mpf(total)
    tol = ctx.ldexp(ctx.one, -(pc.bits + 16))
    small = 0
    m = 0
    while small < 32:
        term = term * (av + m) * zv / ((bv + m) * (m + 1))
        m += 1
        total += term
        if m > abs(zf) and abs(term) < tol * abs(total):
            small += 1
        else:
            small = 0
        if m > 100000 + 10 * abs(zf):
            raise DomainError("hyp1f1 series failed to settle")
    return pc.mp.mpf(total)
