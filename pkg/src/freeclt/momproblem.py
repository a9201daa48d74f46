"""Complete monotonicity of the scaled moment sequence phi(Y**k) exp(-c0 k).

Because Y exp(-c0) lives in (0, 1], the scaled moments must be a Hausdorff
moment sequence on [0, 1], i.e. completely monotone:

    (-1)**j (Delta**j m)_k >= 0    for all j, k.

Margins are computed with the difference-table recurrence at the working
precision and carry rigorous-style error bars propagated from the per-entry
error of the sequence (estimated by recomputation at doubled precision) plus
the rounding of each subtraction.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .asymptotics import c0_of
from .errors import DomainError, PrecisionError
from .moments import as_sigma_sq, moment_y_sum_exact
from .specfun import MONOTONE_BITS, PrecisionContext, to_mpf

__all__ = [
    "ScaledMomentSequence",
    "MonotoneReport",
    "build_scaled_sequence",
    "check_completely_monotone",
]


@dataclass(frozen=True)
class ScaledMomentSequence:
    """m_k = phi(Y**k) exp(-c0 k) for k = 0..K with absolute error bounds."""

    values: tuple
    errors: tuple
    bits: int
    sigma_sq: object = None

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @property
    def error_bound(self):
        return max(self.errors)

    @classmethod
    def from_values(cls, values, pc: PrecisionContext, errors=None, sigma_sq=None):
        """Wrap an arbitrary sequence (e.g. a geometric test sequence)."""
        vals = tuple(to_mpf(v, pc) for v in values)
        if errors is None:
            errors = tuple(abs(v) * pc.eps for v in vals)
        return cls(vals, tuple(errors), pc.bits, sigma_sq)


def _scaled_moments(K, s2, pc: PrecisionContext, c0):
    ctx = pc.mp
    shift = to_mpf(s2, pc) / 2 - c0
    out = [ctx.one]
    for k in range(1, K + 1):
        out.append(to_mpf(moment_y_sum_exact(k, s2), pc) * ctx.exp(shift * k))
    return out


def build_scaled_sequence(K: int, sigma_sq=1, pc: PrecisionContext | None = None) -> ScaledMomentSequence:
    """Scaled moments m_k = phi(Y**k) exp(-c0 k), k = 0..K.

    The binomial sum is exact; the only rounding comes from the final
    exponential.  c0 is computed at twice the working precision.  Each
    entry's error is bounded by its distance to a recomputation at doubled
    precision plus one ulp.
    """
    if K < 2:
        raise DomainError("K must be at least 2")
    pc = pc or PrecisionContext(MONOTONE_BITS)
    s2 = as_sigma_sq(sigma_sq)
    hi = pc.doubled()
    c0_hi = c0_of(s2, hi)
    vals = _scaled_moments(K, s2, pc, pc.mp.mpf(c0_hi))
    ref = _scaled_moments(K, s2, hi, c0_hi)
    errs = []
    for v, r in zip(vals, ref):
        errs.append(pc.mp.mpf(abs(v - r)) + 2 * abs(v) * pc.eps)
    rel = max(e / v for e, v in zip(errs, vals))
    if rel > pc.mp.ldexp(pc.mp.one, -32):
        raise PrecisionError(f"scaled moments only accurate to relative {float(rel):.3g}")
    return ScaledMomentSequence(tuple(vals), tuple(errs), pc.bits, s2)


@dataclass
class MonotoneReport:
    passed: bool
    first_violation: tuple | None
    min_margin: object
    min_margin_at: tuple | None
    error_bound: object
    max_order: int
    K: int
    bits: int
    runtime: float = 0.0
    margins_by_order: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "first_violation": list(self.first_violation) if self.first_violation else None,
            "min_margin": float(self.min_margin),
            "min_margin_at": list(self.min_margin_at) if self.min_margin_at else None,
            "error_bound": float(self.error_bound),
            "J": self.max_order,
            "K": self.K,
            "bits": self.bits,
            "runtime": self.runtime,
        }


def check_completely_monotone(seq: ScaledMomentSequence, max_order: int | None = None) -> MonotoneReport:
    """Check (-1)**j Delta**j m_k >= 0 for 0 <= j <= J, 0 <= k <= K - j.

    ``min_margin`` is the smallest (absolute) margin over the whole table.
    A margin that does not exceed its error bar raises PrecisionError rather
    than reporting a sign that cannot be trusted.
    """
    t0 = time.perf_counter()
    pc = PrecisionContext(seq.bits)
    ctx = pc.mp
    K = seq.K
    J = K if max_order is None else max_order
    if J > K or J < 0:
        raise DomainError("max_order must satisfy 0 <= J <= K")

    row = list(seq.values)
    err = list(seq.errors)
    first_violation = None
    min_margin = None
    min_at = None
    worst_err = ctx.zero
    per_order = []
    for j in range(J + 1):
        if j:
            new_row = []
            new_err = []
            for k in range(len(row) - 1):
                d = row[k] - row[k + 1]  # (-1)**j Delta**j, sign folded in
                new_row.append(d)
                new_err.append(err[k] + err[k + 1] + abs(d) * pc.eps)
            row, err = new_row, new_err
        order_min = None
        for k, (m, e) in enumerate(zip(row, err)):
            if e >= abs(m):
                raise PrecisionError(
                    f"margin at (j={j}, k={k}) is below its error bar; increase precision"
                )
            if m < 0 and first_violation is None:
                first_violation = (j, k)
            if min_margin is None or m < min_margin:
                min_margin, min_at = m, (j, k)
            if order_min is None or m < order_min:
                order_min = m
            if e > worst_err:
                worst_err = e
        per_order.append(order_min)
    return MonotoneReport(
        passed=first_violation is None,
        first_violation=first_violation,
        min_margin=min_margin,
        min_margin_at=min_at,
        error_bound=worst_err,
        max_order=J,
        K=K,
        bits=seq.bits,
        runtime=time.perf_counter() - t0,
        margins_by_order=per_order,
    )
