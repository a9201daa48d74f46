"""Exact truncated power series in (z, eps) over the rationals.

``eps`` stands for n**-1/2.  A :class:`BivariateSeries` stores the matrix of
coefficients ``c[i][j]`` of ``z**i * eps**j`` for ``0 <= i <= M`` and
``0 <= j <= E``; every operation is exact and only discards degrees beyond
the retained orders.  Compositional inversion acts on ``z`` with coefficients
in the truncated polynomial ring Q[eps]/(eps**(E+1)).

The main entry points rebuild the perturbative S-transform of ``exp(eps*v)``:

>>> vm = VMoments(sigma_sq=1)
>>> chi = invert_series(psi_exp_series(vm, 6, 4))
>>> chi.layer(0).coeffs[:4]
(Fraction(0, 1), Fraction(1, 1), Fraction(-1, 1), Fraction(1, 1))
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DomainError
from .specfun import PrecisionContext, default_context, to_mpf

__all__ = [
    "VMoments",
    "BivariateSeries",
    "UnivariateSeries",
    "rational_series",
    "psi_exp_series",
    "invert_series",
    "s_transform_yn",
    "moments_from_chi",
    "closed_form_polynomials",
    "verify_closed_form_identities",
    "DEFAULT_Z_ORDER",
    "DEFAULT_EPS_ORDER",
]

DEFAULT_Z_ORDER = 16
DEFAULT_EPS_ORDER = 4

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    # strings such as "1/4"; mpf and friends go through their exact float value
    try:
        return Fraction(x)
    except TypeError:
        return Fraction(float(x))


@dataclass(frozen=True)
class VMoments:
    """Moments phi(v**2), phi(v**3), phi(v**4) of a zero-mean log-variable ``v``.

    The expansion is formal, so any rationals are accepted unless
    ``strict=True``, which also demands ``m4 >= sigma_sq**2``.
    """

    sigma_sq: Fraction
    m3: Fraction = _ZERO
    m4: Fraction = _ZERO
    strict: bool = False

    def __post_init__(self):
        for name in ("sigma_sq", "m3", "m4"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.sigma_sq <= 0:
            raise DomainError("sigma_sq must be positive")
        if self.strict and self.m4 < self.sigma_sq ** 2:
            raise DomainError("m4 < sigma_sq**2 is not a valid moment sequence")

    def moment(self, j: int) -> Fraction:
        if j == 0:
            return _ONE
        if j == 1:
            return _ZERO
        if j == 2:
            return self.sigma_sq
        if j == 3:
            return self.m3
        if j == 4:
            return self.m4
        raise DomainError(f"phi(v**{j}) is not available; only moments up to order 4 are known")


# ---------------------------------------------------------------------------
# arithmetic in Q[eps]/(eps**(E+1)); elements are lists of length E+1


def _r_mul(a, b, E):
    out = [_ZERO] * (E + 1)
    for i, ai in enumerate(a):
        if ai:
            for j in range(E + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


def _r_inv(a, E):
    if a[0] == 0:
        raise DomainError("coefficient is not invertible: its eps**0 part vanishes")
    inv0 = 1 / a[0]
    out = [_ZERO] * (E + 1)
    out[0] = inv0
    for n in range(1, E + 1):
        acc = sum((a[i] * out[n - i] for i in range(1, n + 1)), _ZERO)
        out[n] = -inv0 * acc
    return out


def _z_mul(f, g, M, E):
    """Product of two z-series with ring coefficients, truncated at z**M."""
    out = [[_ZERO] * (E + 1) for _ in range(M + 1)]
    for i, fi in enumerate(f):
        if not any(fi):
            continue
        for k in range(M + 1 - i):
            gk = g[k]
            if not any(gk):
                continue
            row = out[i + k]
            for a, fa in enumerate(fi):
                if fa:
                    for b in range(E + 1 - a):
                        if gk[b]:
                            row[a + b] += fa * gk[b]
    return out


def _z_reciprocal(f, M, E):
    b0 = _r_inv(f[0], E)
    out = [b0]
    for n in range(1, M + 1):
        acc = [_ZERO] * (E + 1)
        for i in range(1, n + 1):
            prod = _r_mul(f[i], out[n - i], E)
            for j in range(E + 1):
                acc[j] += prod[j]
        out.append([-x for x in _r_mul(b0, acc, E)])
    return out


# ---------------------------------------------------------------------------


class BivariateSeries:
    """Immutable truncated series sum c[i][j] z**i eps**j."""

    __slots__ = ("_c", "z_order", "eps_order")

    def __init__(self, coeffs, z_order: int | None = None, eps_order: int | None = None):
        rows = [list(r) if isinstance(r, (list, tuple)) else [r] for r in coeffs]
        if z_order is None:
            z_order = len(rows) - 1
        if eps_order is None:
            eps_order = max((len(r) for r in rows), default=1) - 1
        if z_order < 0 or eps_order < 0:
            raise DomainError("truncation orders must be nonnegative")
        c = []
        for i in range(z_order + 1):
            r = rows[i] if i < len(rows) else []
            c.append(tuple(_frac(r[j]) if j < len(r) else _ZERO for j in range(eps_order + 1)))
        self._c = tuple(c)
        self.z_order = z_order
        self.eps_order = eps_order

    # construction helpers -------------------------------------------------
    @classmethod
    def _wrap(cls, rows, M, E):
        obj = BivariateSeries.__new__(BivariateSeries)
        obj._c = tuple(tuple(r) for r in rows)
        obj.z_order = M
        obj.eps_order = E
        return obj._retype()

    def _retype(self):
        if self.eps_order == 0 and not isinstance(self, UnivariateSeries):
            u = UnivariateSeries.__new__(UnivariateSeries)
            u._c, u.z_order, u.eps_order = self._c, self.z_order, 0
            return u
        return self

    @classmethod
    def from_layers(cls, layers, z_order: int):
        """Build from z-coefficient sequences, one per power of eps."""
        E = len(layers) - 1
        rows = [[_frac(layers[j][i]) if i < len(layers[j]) else _ZERO for j in range(E + 1)]
                for i in range(z_order + 1)]
        return cls._wrap(rows, z_order, E)

    @classmethod
    def zero(cls, M, E):
        return cls._wrap([[_ZERO] * (E + 1) for _ in range(M + 1)], M, E)

    @classmethod
    def z(cls, M, E):
        s = [[_ZERO] * (E + 1) for _ in range(M + 1)]
        if M >= 1:
            s[1][0] = _ONE
        return cls._wrap(s, M, E)

    @classmethod
    def constant(cls, value, M, E):
        s = [[_ZERO] * (E + 1) for _ in range(M + 1)]
        s[0][0] = _frac(value)
        return cls._wrap(s, M, E)

    # access ---------------------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    def __getitem__(self, idx):
        i, j = idx
        if i > self.z_order or j > self.eps_order:
            raise IndexError("coefficient beyond retained order")
        return self._c[i][j]

    def layer(self, j: int) -> "UnivariateSeries":
        """Coefficient of eps**j as a z-series."""
        return UnivariateSeries([r[j] for r in self._c])

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return (self.z_order, self.eps_order, self._c) == (other.z_order, other.eps_order, other._c)

    def __hash__(self):
        return hash((self.z_order, self.eps_order, self._c))

    def __repr__(self):
        return f"{type(self).__name__}(M={self.z_order}, E={self.eps_order})"

    # arithmetic -----------------------------------------------------------
    def _common(self, other):
        M = min(self.z_order, other.z_order)
        E = min(self.eps_order, other.eps_order)
        return M, E

    def truncate(self, M: int | None = None, E: int | None = None):
        M = self.z_order if M is None else min(M, self.z_order)
        E = self.eps_order if E is None else min(E, self.eps_order)
        return self._wrap([r[: E + 1] for r in self._c[: M + 1]], M, E)

    def __add__(self, other):
        if not isinstance(other, BivariateSeries):
            return self + self.constant(other, self.z_order, self.eps_order)
        M, E = self._common(other)
        rows = [[self._c[i][j] + other._c[i][j] for j in range(E + 1)] for i in range(M + 1)]
        return self._wrap(rows, M, E)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap([[-x for x in r] for r in self._c], self.z_order, self.eps_order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BivariateSeries):
            k = _frac(other)
            return self._wrap([[k * x for x in r] for r in self._c], self.z_order, self.eps_order)
        M, E = self._common(other)
        a = [list(r[: E + 1]) for r in self._c[: M + 1]]
        b = [list(r[: E + 1]) for r in other._c[: M + 1]]
        return self._wrap(_z_mul(a, b, M, E), M, E)

    __rmul__ = __mul__

    def __pow__(self, p: int):
        if p < 0:
            return self.reciprocal() ** (-p)
        out = self.constant(1, self.z_order, self.eps_order)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base
            p >>= 1
        return out

    def reciprocal(self):
        rows = _z_reciprocal([list(r) for r in self._c], self.z_order, self.eps_order)
        return self._wrap(rows, self.z_order, self.eps_order)

    def __truediv__(self, other):
        if not isinstance(other, BivariateSeries):
            return self * (1 / _frac(other))
        return self * other.reciprocal()

    def div_z(self):
        """Divide by z; the z**0 row must vanish.  Lowers the z-order by one."""
        if any(self._c[0]):
            raise DomainError("series has a nonzero constant term; cannot divide by z")
        return self._wrap(self._c[1:], self.z_order - 1, self.eps_order)

    def mul_z(self):
        zero = [_ZERO] * (self.eps_order + 1)
        return self._wrap([zero] + [list(r) for r in self._c[:-1]], self.z_order, self.eps_order)

    def shift_eps(self, d: int):
        """Multiply by eps**d; for d < 0 the dropped low layers must vanish."""
        E = self.eps_order
        if d >= 0:
            rows = [[_ZERO] * d + list(r[: E + 1 - d]) for r in self._c]
            return self._wrap(rows, self.z_order, E)
        d = -d
        if any(r[j] for r in self._c for j in range(min(d, E + 1))):
            raise DomainError(f"cannot divide by eps**{d}: lower eps layers are nonzero")
        return self._wrap([list(r[d:]) for r in self._c], self.z_order, E - d)

    def compose(self, inner: "BivariateSeries"):
        """self(inner(z, eps), eps); ``inner`` must have zero constant term."""
        if any(inner._c[0]):
            raise DomainError("inner series must have zero constant term")
        M, E = self._common(inner)
        g = [list(r[: E + 1]) for r in inner._c[: M + 1]]
        out = [[_ZERO] * (E + 1) for _ in range(M + 1)]
        for i in range(M, -1, -1):
            out = _z_mul(out, g, M, E)
            for j in range(E + 1):
                out[0][j] += self._c[i][j]
        return self._wrap(out, M, E)

    def _eps_nilpotent_part(self):
        c0 = self._c[0][0]
        if any(r[0] for r in self._c[1:]):
            raise DomainError("eps**0 layer must be constant")
        return c0

    def log(self):
        """Logarithm of a series whose eps**0 layer is exactly 1."""
        if self._eps_nilpotent_part() != 1:
            raise DomainError("log requires the eps**0 layer to equal 1")
        u = self - 1
        out = self.zero(self.z_order, self.eps_order)
        power = u
        for p in range(1, self.eps_order + 1):
            out = out + power * Fraction((-1) ** (p + 1), p)
            power = power * u
        return out

    def exp(self):
        """Exponential of a series whose eps**0 layer vanishes."""
        if self._eps_nilpotent_part() != 0:
            raise DomainError("exp requires a vanishing eps**0 layer")
        out = self.constant(1, self.z_order, self.eps_order)
        term = out
        for p in range(1, self.eps_order + 1):
            term = term * self * Fraction(1, p)
            out = out + term
        return out

    def invert(self):
        return invert_series(self)


class UnivariateSeries(BivariateSeries):
    """A series in z alone (eps-order 0)."""

    __slots__ = ()

    def __init__(self, coeffs, z_order: int | None = None):
        super().__init__([[c] for c in coeffs], z_order, 0)

    @property
    def coeffs(self):
        return tuple(r[0] for r in self._c)

    def __getitem__(self, i):
        if isinstance(i, tuple):
            return super().__getitem__(i)
        return self._c[i][0]

    def __len__(self):
        return self.z_order + 1


def rational_series(num, den, M: int) -> UnivariateSeries:
    """Taylor coefficients of num(z)/den(z) up to z**M (ascending coefficient lists)."""
    n = UnivariateSeries(num, M)
    d = UnivariateSeries(den, M)
    return n * d.reciprocal()


# ---------------------------------------------------------------------------


def invert_series(s: BivariateSeries) -> BivariateSeries:
    """Compositional inverse in z by Lagrange-Buermann.

    Writing ``s(w) = w / phi(w)``, the inverse is
    ``g(z) = sum_k z**k/k * [w**(k-1)] phi(w)**k``.  For a bivariate series
    the coefficients live in Q[eps]/(eps**(E+1)), so the inversion proceeds
    order by order in eps automatically.
    """
    M, E = s.z_order, s.eps_order
    if any(s._c[0]):
        raise DomainError("series to invert must have zero constant term")
    if M < 1 or s._c[1][0] == 0:
        raise DomainError("linear coefficient must be nonzero at eps**0")
    h = [list(r) for r in s._c[1:]] + [[_ZERO] * (E + 1)]  # s/z, padded back to order M
    # the padding only feeds phi**k beyond w**(M-1), which is never read
    phi = _z_reciprocal(h, M, E)
    out = [[_ZERO] * (E + 1) for _ in range(M + 1)]
    power = [[_ONE] + [_ZERO] * E] + [[_ZERO] * (E + 1) for _ in range(M)]
    for k in range(1, M + 1):
        power = _z_mul(power, phi, M - 1, E) + [[_ZERO] * (E + 1)]
        out[k] = [x / k for x in power[k - 1]]
    return s._wrap(out, M, E)


def psi_exp_series(vm: VMoments, M: int = DEFAULT_Z_ORDER, E: int = DEFAULT_EPS_ORDER) -> BivariateSeries:
    """Moment function of exp(eps*v): sum_{l>=1} phi(exp(l eps v)) z**l.

    ``phi(exp(l eps v)) = sum_j (l eps)**j phi(v**j)/j!`` with phi(v) = 0.
    """
    if M < 1:
        raise DomainError("z-order must be at least 1")
    if E > 4:
        raise DomainError("eps-order above 4 needs moments phi(v**k), k > 4, which are not known")
    mom = [vm.moment(j) / factorial(j) for j in range(E + 1)]
    rows = [[_ZERO] * (E + 1)]
    for l in range(1, M + 1):
        rows.append([mom[j] * l ** j for j in range(E + 1)])
    return BivariateSeries._wrap(rows, M, E)


def s_transform_yn(vm: VMoments, M: int = DEFAULT_Z_ORDER, E: int = DEFAULT_EPS_ORDER) -> BivariateSeries:
    """Exponent of S_{Y_n}(z) = S_{exp(eps v)}(z)**n with n = eps**-2.

    Returns ``n * log S`` as a series in (z, eps) of orders (M-1, E-2).  Its
    eps**0 layer is the limit exponent -sigma_sq (z + 1/2).
    """
    chi = invert_series(psi_exp_series(vm, M, E))
    one_plus_z = BivariateSeries.constant(1, M, E) + BivariateSeries.z(M, E)
    s = (chi * one_plus_z).div_z()
    return s.log().shift_eps(-2)


def moments_from_chi(sigma_sq, K: int, pc: PrecisionContext | None = None):
    """First K moments of Y from chi_Y(z) = z/(1+z) exp(-sigma_sq (z + 1/2)).

    The rational part q(z) = z/(1+z) exp(-sigma_sq z) is inverted exactly;
    the scalar exp(-sigma_sq/2) rescales the k-th coefficient by
    exp(sigma_sq k/2), applied last at precision ``pc``.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    pc = pc or default_context()
    s2 = _frac(sigma_sq)
    # z/(1+z) * exp(-s2 z) = sum_i c_i z**i
    expo = [Fraction((-s2) ** n) / factorial(n) for n in range(K + 1)]
    geo = [Fraction((-1) ** n) for n in range(K + 1)]
    q = UnivariateSeries(geo, K).mul_z() * UnivariateSeries(expo, K)
    g = invert_series(q)
    ctx = pc.mp
    half = to_mpf(s2, pc) / 2
    return [to_mpf(g[k], pc) * ctx.exp(half * k) for k in range(1, K + 1)]


# ---------------------------------------------------------------------------
# closed-form polynomials of the perturbative expansion


def closed_form_polynomials():
    """Ascending coefficient lists of the closed-form g3, g4 numerators and h3, h4."""
    F = Fraction
    return {
        "g3": ([1, 4, 1], 3),  # numerator, power of (1 - z) in the denominator
        "g4": ([1, 11, 11, 1], 4),
        "h3": [F(1, 6), 1, 1],
        "h4": [F(5, 24), F(7, 6), 2, 1],
    }


def _poly_times_factor(poly, factor_num, factor_den, M):
    s = rational_series(poly, [1], M)
    return s * rational_series(factor_num, factor_den, M)


def _binomial_den(power):
    # (1 - z)**power as ascending coefficients
    from math import comb
    return [comb(power, i) * (-1) ** i for i in range(power + 1)]


def verify_closed_form_identities(M: int = DEFAULT_Z_ORDER, E: int = DEFAULT_EPS_ORDER) -> dict:
    """Check the closed-form g3, g4, h3, h4 and the limit exponent coefficient-exactly.

    * g3, g4: the eps**3, eps**4 layers of psi equal
      phi(v**3)/6 * z/(1-z) * g3 and phi(v**4)/24 * z/(1-z) * g4.
    * h3: the eps**3 layer of chi equals -phi(v**3) h3 z/(1+z) and the eps**1
      layer of the S exponent equals -phi(v**3) h3.
    * h4: the closed-form h4 absorbs the phi(v**2)**2 contribution, so it is exact
      where phi(v**2)**2 = phi(v**4) = 1; there the eps**4 layer of chi equals
      h4 z/(1+z) and the eps**2 exponent layer equals h4 - (z + 1/2)**2/2.
    * limit_S: the eps**0 exponent layer equals -sigma_sq (z + 1/2).
    """
    if E < 4:
        raise DomainError("verification needs eps-order 4")
    P = closed_form_polynomials()
    results = {}

    vm3 = VMoments(sigma_sq=1, m3=1, m4=0)
    vm4 = VMoments(sigma_sq=1, m3=0, m4=1)
    psi3 = psi_exp_series(vm3, M, E)
    psi4 = psi_exp_series(vm4, M, E)

    num, p = P["g3"]
    want = _poly_times_factor(num, [0, 1], _binomial_den(p + 1), M) * Fraction(1, 6)
    results["g3"] = psi3.layer(3) == want

    num, p = P["g4"]
    want = _poly_times_factor(num, [0, 1], _binomial_den(p + 1), M) * Fraction(1, 24)
    results["g4"] = psi4.layer(4) == want

    z_over = rational_series([0, 1], [1, 1], M)
    chi3 = invert_series(psi3)
    want_h3 = -(rational_series(P["h3"], [1], M) * z_over)
    ok = chi3.layer(3) == want_h3
    ex3 = s_transform_yn(vm3, M, E)
    ok = ok and ex3.layer(1) == -rational_series(P["h3"], [1], M - 1)
    results["h3"] = ok

    chi4 = invert_series(psi4)
    want_h4 = rational_series(P["h4"], [1], M) * z_over
    ok = chi4.layer(4) == want_h4
    ex4 = s_transform_yn(vm4, M, E)
    zh = rational_series([Fraction(1, 2), 1], [1], M - 1)
    ok = ok and ex4.layer(2) == rational_series(P["h4"], [1], M - 1) - zh * zh * Fraction(1, 2)
    results["h4"] = ok

    ok = True
    for s2 in (Fraction(1), Fraction(1, 4), Fraction(4)):
        ex = s_transform_yn(VMoments(sigma_sq=s2, m3=Fraction(1, 3), m4=Fraction(2)), M, E)
        ok = ok and ex.layer(0) == rational_series([-s2 / 2, -s2], [1], M - 1)
    results["limit_S"] = ok
    return results
