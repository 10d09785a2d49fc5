"""Closed-form estimators of the half-normal location and scale.

Covers the unbiased pair, the maximum-likelihood pair, the minimum-risk
equivariant (MRE) scale estimator, and the known-parameter variants: the
Pitman location estimator for known scale, and the MRE / UMVU scale
estimators for known location.

Gamma ratios and Student-t tails are evaluated in log space throughout;
at sample sizes in the thousands the plain tail probabilities underflow
while their ratio stays moderate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dist import SQRT_2_OVER_PI, Sample
from .errors import DegenerateSampleError, DomainError
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    adaptive_quadrature,
    log_gamma,
    norm_logcdf,
    norm_logpdf,
    student_t_log_tail,
)

__all__ = [
    "EstimatorMethod",
    "LocationScaleEstimate",
    "unbiased",
    "mle",
    "unbiased_eta_squared",
    "mre_scale",
    "mre_scale_by_integration",
    "pitman_location_known_scale",
    "mre_scale_known_location",
    "umvu_scale_known_location",
    "known_location_mre_constant",
    "known_location_umvu_constant",
]


class EstimatorMethod(Enum):
    UNBIASED = "unbiased"
    MLE = "mle"
    MRE = "mre"
    PITMAN_KNOWN_SCALE = "pitman_known_scale"
    MRE_KNOWN_LOCATION = "mre_known_location"
    UMVU_KNOWN_LOCATION = "umvu_known_location"


@dataclass(frozen=True)
class LocationScaleEstimate:
    """A location/scale estimate pair; fields are None when the method
    does not estimate that parameter."""

    xi_hat: float | None
    eta_hat: float | None
    method: EstimatorMethod

    def __post_init__(self) -> None:
        if self.eta_hat is not None and not self.eta_hat >= 0.0:
            raise DomainError(f"eta_hat must be >= 0, got {self.eta_hat}")


def unbiased(sample: Sample, c_n: float) -> LocationScaleEstimate:
    """Unbiased estimators of location and scale.

    xi = (sqrt(2/pi) * min - c_n * mean) / (sqrt(2/pi) - c_n)
    eta = (mean - min) / (sqrt(2/pi) - c_n)

    ``c_n`` is the expected minimum of n iid |N(0,1)| draws, computed once
    per sample size by :func:`halfnormal.specfun.half_min_constant`.
    """
    if not (0.0 < c_n < SQRT_2_OVER_PI):
        raise DomainError(
            f"c_n must lie in (0, sqrt(2/pi)); got {c_n} (wrong n or bad constant?)"
        )
    denom = SQRT_2_OVER_PI - c_n
    if denom < 1e-300:
        raise DegenerateSampleError("sqrt(2/pi) - c_n underflowed")
    xi = (SQRT_2_OVER_PI * sample.minimum - c_n * sample.mean) / denom
    eta = (sample.mean - sample.minimum) / denom
    return LocationScaleEstimate(xi, eta, EstimatorMethod.UNBIASED)


def mle(sample: Sample) -> LocationScaleEstimate:
    """Maximum likelihood: xi = sample minimum, eta = RMS deviation from it.

    (1/n) sum (y - min)^2 = ((n-1)/n) S^2 + (mean - min)^2, so the estimate
    is a function of the cached sufficient-statistic summaries alone.
    """
    n = sample.n
    gap = sample.mean - sample.minimum
    eta = math.sqrt((n - 1) / n * sample.s2 + gap * gap)
    return LocationScaleEstimate(sample.minimum, eta, EstimatorMethod.MLE)


def unbiased_eta_squared(sample: Sample) -> float:
    """Unbiased estimator of eta^2: pi/(pi-2) times the sample variance."""
    return math.pi / (math.pi - 2.0) * sample.s2


def _mre_scale_ratio_stat(sample: Sample) -> float:
    if sample.n < 3:
        raise DomainError(f"MRE scale estimation needs n >= 3, got {sample.n}")
    if sample.s2 <= 0.0:
        raise DegenerateSampleError("sample variance is zero; scale ratio undefined")
    return (sample.mean - sample.minimum) / math.sqrt(sample.s2)


def mre_scale(sample: Sample) -> LocationScaleEstimate:
    """Minimum risk equivariant estimator of the scale under loss (x-eta)^2/eta^2.

    eta = sqrt((n-1)/2) * Gamma((n+1)/2)/Gamma((n+2)/2)
          * T_{n+1}(sqrt(n(n+1)/(n-1)) * q) / T_{n+2}(sqrt(n(n+2)/(n-1)) * q) * S

    with q = (mean - min)/S and T_k the upper tail of Student-t(k).
    """
    n = sample.n
    q = _mre_scale_ratio_stat(sample)
    s = math.sqrt(sample.s2)
    log_tail_hi = student_t_log_tail(math.sqrt(n * (n + 1) / (n - 1.0)) * q, n + 1)
    log_tail_lo = student_t_log_tail(math.sqrt(n * (n + 2) / (n - 1.0)) * q, n + 2)
    log_eta = (
        0.5 * math.log((n - 1.0) / 2.0)
        + log_gamma((n + 1) / 2.0)
        - log_gamma((n + 2) / 2.0)
        + log_tail_hi
        - log_tail_lo
    )
    return LocationScaleEstimate(None, math.exp(log_eta) * s, EstimatorMethod.MRE)


def _log_scale_moment_integral(
    k: int, beta: float, a: float, spec: QuadratureSpec
) -> float:
    """log of integral over v >= 0 of v^k * exp(-beta*v^2/2) * Phi(-a*v).

    The exponent h(v) = k*log v - beta*v^2/2 + log Phi(-a*v) is strictly
    concave; the integral is evaluated as exp(h_max) times the quadrature
    of exp(h - h_max) over the region where that factor is above ~1e-26.
    """

    def h(v: float) -> float:
        return k * math.log(v) - 0.5 * beta * v * v + norm_logcdf(-a * v)

    # Peak of v^k * exp(-beta v^2/2) alone; the Phi factor only pulls it left.
    v0 = math.sqrt(k / beta)
    lo, hi = v0 * 1e-8, v0 * 1.5
    # Golden-section maximization of the concave exponent.
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    h1, h2 = h(x1), h(x2)
    for _ in range(200):
        if hi - lo < 1e-13 * v0:
            break
        if h1 < h2:
            lo, x1, h1 = x1, x2, h2
            x2 = lo + invphi * (hi - lo)
            h2 = h(x2)
        else:
            hi, x2, h2 = x2, x1, h1
            x1 = hi - invphi * (hi - lo)
            h1 = h(x1)
    v_peak = 0.5 * (lo + hi)
    h_max = h(v_peak)
    v_hi = v_peak
    while h(v_hi) - h_max > -60.0:
        v_hi *= 1.5
    integral = adaptive_quadrature(
        lambda v: math.exp(h(v) - h_max) if v > 0.0 else 0.0, 0.0, v_hi, spec
    )
    return h_max + math.log(integral)


def mre_scale_by_integration(
    sample: Sample, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """MRE scale estimate by direct quadrature of its defining moment ratio.

    Evaluates the two scale-mixture integrals whose ratio defines the MRE
    estimator (the inner normal integral reduced to Phi in closed form, the
    outer integral over the scale variable done numerically in log space).
    Exists as an independent check on :func:`mre_scale`; the two must agree
    to near quadrature accuracy.
    """
    n = sample.n
    _mre_scale_ratio_stat(sample)  # validates n and S
    beta = (n - 1.0) * sample.s2
    a = math.sqrt(n) * (sample.mean - sample.minimum)
    log_i_n = _log_scale_moment_integral(n, beta, a, spec)
    log_i_n1 = _log_scale_moment_integral(n + 1, beta, a, spec)
    return math.exp(log_i_n - log_i_n1)


def pitman_location_known_scale(sample: Sample, eta0: float) -> float:
    """Pitman (MRE, squared loss) estimator of the location when the scale
    is known to be ``eta0``.

    T = mean - (eta0/sqrt(n)) * phi(z)/Phi(z),  z = sqrt(n)*(min - mean)/eta0.

    z <= 0 and |z| grows like sqrt(n), so the ratio is evaluated as
    exp(log phi(z) - log Phi(z)) with the far-tail log-CDF branch.
    """
    if not eta0 > 0.0:
        raise DomainError(f"eta0 must be > 0, got {eta0}")
    n = sample.n
    z = math.sqrt(n) * (sample.minimum - sample.mean) / eta0
    return sample.mean - (eta0 / math.sqrt(n)) * math.exp(
        norm_logpdf(z) - norm_logcdf(z)
    )


def known_location_mre_constant(n: int) -> float:
    """Gamma((n+1)/2) / (sqrt(2) * Gamma((n+2)/2))."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.exp(
        log_gamma((n + 1) / 2.0) - log_gamma((n + 2) / 2.0) - 0.5 * math.log(2.0)
    )


def known_location_umvu_constant(n: int) -> float:
    """Gamma(n/2) / (sqrt(2) * Gamma((n+1)/2))."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.exp(
        log_gamma(n / 2.0) - log_gamma((n + 1) / 2.0) - 0.5 * math.log(2.0)
    )


def _known_location_sumsq(sample: Sample, xi0: float) -> float:
    """sum (y - xi0)^2 = (n-1) S^2 + n (mean - xi0)^2, from the cached
    summaries; the support check only needs the minimum."""
    if sample.minimum < xi0:
        raise DomainError(
            f"all observations must be >= the known location xi0={xi0}"
        )
    gap = sample.mean - xi0
    sumsq = (sample.n - 1) * sample.s2 + sample.n * gap * gap
    if sumsq <= 0.0:
        raise DegenerateSampleError("every observation equals xi0")
    return sumsq


def mre_scale_known_location(sample: Sample, xi0: float) -> float:
    """MRE estimator of the scale for known location, loss (x-eta)^2/eta^2."""
    sumsq = _known_location_sumsq(sample, xi0)
    return known_location_mre_constant(sample.n) * math.sqrt(sumsq)


def umvu_scale_known_location(sample: Sample, xi0: float) -> float:
    """Minimum variance unbiased estimator of the scale for known location."""
    sumsq = _known_location_sumsq(sample, xi0)
    return known_location_umvu_constant(sample.n) * math.sqrt(sumsq)
