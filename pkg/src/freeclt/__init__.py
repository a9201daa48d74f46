"""Free multiplicative central limit: exact moments, series, and simulation."""
from .asymptotics import (
    AsymptoticConstants,
    alpha0_of,
    asymptotic_constants,
    c0_of,
    moment_asymptotic,
    saddle_constants,
)
from .errors import (
    ConvergenceError,
    DomainError,
    FreeCLTError,
    NumericalError,
    OverflowGuardError,
    PrecisionError,
)
from .momproblem import MonotoneReport, ScaledMomentSequence, build_scaled_sequence, check_completely_monotone
from .moments import (
    LogMomentPolynomial,
    ModelParams,
    SemicircleLaw,
    log_moment,
    log_moment_poly,
    log_semicircle_moment,
    mgf_log_y,
    moment_y,
    semicircle_moment,
    semicircle_pdf,
)
from .radius import RadiusCurve, implied_radius_log, implied_radius_y, radius_curve
from .rmt import SimConfig, SpectrumSample, empirical_moments, free_product_clt, histogram
from .series import BivariateSeries, UnivariateSeries, VMoments, invert_series, moments_from_chi
from .specfun import PrecisionContext, bessel_i, catalan, hyp1f1, laguerre, lambert_w0, stirling_first

__version__ = "0.1.0"
