"""Monte Carlo of the free multiplicative central limit with large random matrices.

Each factor is X = U diag(exp(g / sqrt(n))) U^H with U Haar-distributed and
g a sample of N(0, sigma_sq) eigenvalues.  The product is accumulated in the
symmetrized form Y <- X^{1/2} Y X^{1/2}, which keeps Y Hermitian positive
definite at every step.

Random streams use numpy's counter-based Philox generator keyed by
``SeedSequence([seed, trial])``, so a trial's draws depend only on the seed
and its index, never on scheduling.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import DomainError, NumericalError, OverflowGuardError
from .moments import semicircle_cdf

__all__ = [
    "EIG_SCHEMES",
    "SimConfig",
    "SpectrumSample",
    "Histogram",
    "MomentEstimate",
    "trial_rng",
    "haar_unitary",
    "sample_factor",
    "free_product_clt",
    "histogram",
    "freedman_diaconis_bins",
    "semicircle_discrepancy",
    "empirical_moments",
    "empirical_log_moment",
    "jackknife_mean",
]

EIG_SCHEMES = ("iid_normal", "quantile")

# semicircle quartile: F(0.404...R) = 3/4, so IQR = 0.8079 R
_SEMICIRCLE_IQR = 0.8079455


def _c0(sigma_sq: float) -> float:
    s = math.sqrt(sigma_sq)
    return s * math.sqrt(1 + sigma_sq / 4) + 2 * math.asinh(s / 2)


@dataclass(frozen=True)
class SimConfig:
    """Description of one random-matrix experiment.

    ``bins=None`` picks the Freedman-Diaconis bin count for a semicircle of
    radius c0 with ``trials * dim`` samples.
    """

    dim: int = 128
    n_factors: int = 64
    trials: int = 20
    sigma_sq: float = 1.0
    seed: int = 0
    eig_scheme: str = "iid_normal"
    bins: int | None = None
    range_mult: float = 1.25

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dim must be >= 2")
        if self.n_factors < 1 or self.trials < 1:
            raise DomainError("n_factors and trials must be positive")
        if not self.sigma_sq > 0:
            raise DomainError("sigma_sq must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.eig_scheme not in EIG_SCHEMES:
            raise DomainError(f"eig_scheme must be one of {EIG_SCHEMES}")
        if self.bins is not None and self.bins < 3:
            raise DomainError("bins must be >= 3")
        if self.range_mult < 1:
            raise DomainError("range_mult must be >= 1")

    @property
    def c0(self) -> float:
        return _c0(self.sigma_sq)

    @property
    def n_bins(self) -> int:
        if self.bins is not None:
            return self.bins
        return freedman_diaconis_bins(self.trials * self.dim, self.range_mult)

    def to_dict(self) -> dict:
        return asdict(self)


def freedman_diaconis_bins(n_samples: int, range_mult: float = 1.25) -> int:
    """Bins over [-range_mult R, range_mult R] at the Freedman-Diaconis width
    2 IQR n**(-1/3) of a radius-R semicircle (independent of R)."""
    width = 2 * _SEMICIRCLE_IQR * n_samples ** (-1 / 3)
    return max(3, math.ceil(2 * range_mult / width))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Ginibre matrix.

    Columns of Q are rescaled by the phases of R's diagonal so that the
    result is exactly Haar distributed.
    """
    if dim < 1:
        raise DomainError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _log_spectrum(dim, sigma_sq, rng, eig_scheme):
    sigma = math.sqrt(sigma_sq)
    if eig_scheme == "iid_normal":
        return rng.normal(0.0, sigma, dim)
    if eig_scheme == "quantile":
        g = sigma * ndtri((np.arange(dim) + 0.5) / dim)
        return rng.permutation(g)
    raise DomainError(f"unknown eig_scheme {eig_scheme!r}")


def sample_factor(dim, sigma_sq, scale, rng, eig_scheme="iid_normal", *, power=1.0):
    """Hermitian positive-definite X = U diag(exp(scale g)) U^H.

    ``power`` returns X**power from the same spectral decomposition instead;
    the product pipeline uses ``power=0.5`` so the square root costs nothing
    beyond the construction.
    """
    if not scale > 0:
        raise DomainError("scale must be positive")
    g = _log_spectrum(dim, sigma_sq, rng, eig_scheme)
    u = haar_unitary(dim, rng)
    return (u * np.exp(power * scale * g)) @ u.conj().T


@dataclass
class SpectrumSample:
    """Sorted log-eigenvalues of Y_n pooled over trials, plus per-trial rows."""

    log_eigs: np.ndarray
    trial_log_eigs: np.ndarray  # shape (trials, dim), each row sorted
    config: SimConfig

    def __post_init__(self):
        if self.log_eigs.size != self.config.trials * self.config.dim:
            raise ValueError("sample size does not match trials * dim")

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.log_eigs)))


def _run_trial(config: SimConfig, trial: int) -> np.ndarray:
    rng = trial_rng(config.seed, trial)
    n = config.n_factors
    scale = 1.0 / math.sqrt(n)
    y = np.eye(config.dim, dtype=complex)
    for step in range(n):
        s = sample_factor(config.dim, config.sigma_sq, scale, rng, config.eig_scheme, power=0.5)
        y = s @ y @ s
        y = (y + y.conj().T) / 2
        try:
            np.linalg.cholesky(y)
        except np.linalg.LinAlgError:
            raise NumericalError(
                f"Y lost positive definiteness at trial {trial}, step {step}",
                trial=trial, step=step,
            ) from None
    lam = np.linalg.eigvalsh(y)
    if lam[0] <= 0:
        raise NumericalError(f"nonpositive eigenvalue in trial {trial}", trial=trial, step=n - 1)
    return np.log(lam)


def free_product_clt(config: SimConfig, workers: int = 1) -> SpectrumSample:
    """Run all trials and pool the log-eigenvalues of Y_n.

    Trials are independent and may run on ``workers`` threads; the output is
    bit-identical for any worker count.
    """
    idx = range(config.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(lambda t: _run_trial(config, t), idx))
    else:
        rows = [_run_trial(config, t) for t in idx]
    per_trial = np.sort(np.vstack(rows), axis=1)
    pooled = np.sort(per_trial.ravel())
    if not np.all(np.isfinite(pooled)):
        raise NumericalError("non-finite log-eigenvalue")
    return SpectrumSample(pooled, per_trial, config)


@dataclass
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    c0: float
    normalized: bool = False
    n_outside: int = 0

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[1:] + self.edges[:-1]) / 2

    def rows(self):
        return list(zip(self.edges[:-1].tolist(), self.edges[1:].tolist(), self.densities.tolist()))


def histogram(sample: SpectrumSample, config: SimConfig | None = None, *, normalize: bool = False) -> Histogram:
    """Unit-mass density histogram on [-range_mult c0, range_mult c0].

    With ``normalize`` the x-axis is divided by c0 (and densities scaled to
    keep unit mass).
    """
    config = config or sample.config
    x = np.asarray(sample.log_eigs, dtype=float)
    if x.size == 0:
        raise DomainError("empty sample")
    c0 = config.c0
    half = config.range_mult * c0
    edges = np.linspace(-half, half, config.n_bins + 1)
    counts, _ = np.histogram(x, edges)
    inside = counts.sum()
    dens = counts / (inside * (edges[1] - edges[0]))
    if normalize:
        edges = edges / c0
        dens = dens * c0
    return Histogram(edges, dens, c0, normalize, int(x.size - inside))


def semicircle_discrepancy(hist: Histogram, radius: float | None = None) -> float:
    """Sup-norm distance between the histogram and the semicircle law.

    The reference is the semicircle's average density over each bin, which is
    what a histogram estimates.
    """
    R = radius if radius is not None else hist.c0
    edges = hist.edges * (hist.c0 if hist.normalized else 1.0)
    mass = np.diff(semicircle_cdf(edges, R))
    ref = mass / np.diff(edges)
    if hist.normalized:
        ref = ref * hist.c0
    return float(np.max(np.abs(hist.densities - ref)))


def jackknife_mean(per_trial: np.ndarray) -> tuple[float, float]:
    """Pooled mean of equal-size trial means and its leave-one-trial-out SE."""
    x = np.asarray(per_trial, dtype=float)
    T = x.size
    est = float(x.mean())
    if T < 2:
        return est, float("nan")
    loo = (x.sum() - x) / (T - 1)
    se = math.sqrt((T - 1) / T * float(np.sum((loo - loo.mean()) ** 2)))
    return est, se


@dataclass
class MomentEstimate:
    k: int
    y_moment: float
    y_stderr: float
    log_moment: float  # mean of (log lambda)**(2k)
    log_stderr: float
    extra: dict = field(default_factory=dict)


_OVERFLOW_LIMIT = 700 * math.log(2)


def empirical_log_moment(sample: SpectrumSample, p: int) -> tuple[float, float]:
    """Mean of (log lambda)**p with jackknife-over-trials SE."""
    return jackknife_mean(np.mean(sample.trial_log_eigs ** p, axis=1))


def empirical_moments(sample: SpectrumSample, k_list) -> list[MomentEstimate]:
    """Means of lambda**k and (log lambda)**(2k) with jackknife SEs."""
    out = []
    peak = sample.max_abs
    for k in k_list:
        if k < 0:
            raise DomainError("k must be nonnegative")
        if k * peak >= _OVERFLOW_LIMIT:
            raise OverflowGuardError(k)
        ym, yse = jackknife_mean(np.mean(np.exp(k * sample.trial_log_eigs), axis=1))
        lm, lse = empirical_log_moment(sample, 2 * k)
        out.append(MomentEstimate(k, ym, yse, lm, lse))
    return out
