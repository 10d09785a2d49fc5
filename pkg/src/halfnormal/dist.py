"""The general half-normal distribution HN(xi, eta) and related samplers.

HN(xi, eta) is the law of xi + eta*|Z| with Z standard normal: support
[xi, inf), density (1/eta) * sqrt(2/pi) * exp(-((y-xi)/eta)^2 / 2).

Normal variates come from numpy's ziggurat sampler over PCG64 streams
derived with :func:`halfnormal.rng.derive_generator`, so every sample is
reproducible from a 64-bit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .rng import RngSeed, derive_generator

__all__ = [
    "SQRT_2_OVER_PI",
    "HalfNormalParams",
    "Sample",
    "pdf",
    "mean_var",
    "sample",
    "sample_bivariate_normal",
    "bivariate_pair_sampler",
    "sincos_pair_sampler",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)  # E|Z| for Z ~ N(0,1)


@dataclass(frozen=True)
class HalfNormalParams:
    """Location xi and scale eta > 0 of HN(xi, eta)."""

    xi: float
    eta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.xi) and math.isfinite(self.eta)):
            raise DomainError(f"parameters must be finite, got ({self.xi}, {self.eta})")
        if not self.eta > 0.0:
            raise DomainError(f"scale eta must be > 0, got {self.eta}")


@dataclass(frozen=True)
class Sample:
    """An ordered sample with its cached summaries.

    ``mean``, ``minimum``, ``s2`` (variance, divisor n-1) and ``t1_star``
    (mean absolute deviation about the mean) are computed once at
    construction; every estimator in the package reads them from here.
    """

    values: np.ndarray
    n: int = field(init=False)
    mean: float = field(init=False)
    minimum: float = field(init=False)
    s2: float = field(init=False)
    t1_star: float = field(init=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DomainError(f"sample values must be 1-D, got shape {values.shape}")
        if values.size < 2:
            raise DomainError(f"a sample needs n >= 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("sample values must all be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", int(values.size))
        mean = float(values.mean())
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "minimum", float(values.min()))
        object.__setattr__(self, "s2", float(values.var(ddof=1)))
        object.__setattr__(self, "t1_star", float(np.abs(values - mean).mean()))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Sample":
        return cls(np.asarray(values, dtype=float))


def pdf(params: HalfNormalParams, y):
    """Density of HN(params); accepts a scalar or an ndarray."""
    y = np.asarray(y, dtype=float)
    z = (y - params.xi) / params.eta
    out = np.where(
        z < 0.0, 0.0, (SQRT_2_OVER_PI / params.eta) * np.exp(-0.5 * z * z)
    )
    if out.ndim == 0:
        return float(out)
    return out


def mean_var(params: HalfNormalParams) -> tuple[float, float]:
    """Mean xi + eta*sqrt(2/pi) and variance eta^2*(pi-2)/pi."""
    mean = params.xi + params.eta * SQRT_2_OVER_PI
    var = params.eta**2 * (math.pi - 2.0) / math.pi
    return mean, var


def sample(params: HalfNormalParams, n: int, seed: RngSeed | int) -> Sample:
    """Draw n iid values xi + eta*|Z|, deterministic in the seed."""
    if n < 2:
        raise DomainError(f"sample size must be >= 2, got {n}")
    rng = derive_generator(seed)
    x = np.abs(rng.standard_normal(n))
    return Sample(params.xi + params.eta * x)


def _check_cov(cov: float) -> None:
    if not (-1.0 < cov < 1.0):
        raise DomainError(f"cov must lie in the open interval (-1, 1), got {cov}")


def _draw_bivariate(rng: np.random.Generator, cov: float, n: int) -> np.ndarray:
    """Pairs with unit marginal variances and correlation ``cov`` (Cholesky)."""
    z = rng.standard_normal((n, 2))
    x = z[:, 0]
    y = cov * x + math.sqrt(1.0 - cov * cov) * z[:, 1]
    return np.column_stack([x, y])


def sample_bivariate_normal(cov: float, n: int, seed: RngSeed | int) -> np.ndarray:
    """n pairs from the zero-mean bivariate normal with unit variances."""
    _check_cov(cov)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return _draw_bivariate(derive_generator(seed), cov, n)


PairSampler = Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]]


def bivariate_pair_sampler(cov: float = 0.5) -> PairSampler:
    """Stream of conditioning/response pairs (X, Y) from the bivariate normal."""
    _check_cov(cov)

    def draw(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        xy = _draw_bivariate(rng, cov, size)
        return xy[:, :1], xy[:, 1]

    return draw


def sincos_pair_sampler(cov: float = 0.5) -> PairSampler:
    """Stream of pairs (cos(X^2+Y^2), sin(X*Y)) built on the same bivariate normal.

    Useful as a conditioning problem whose joint density has no convenient
    closed form: the conditional mean of sin(X*Y) given cos(X^2+Y^2) must be
    estimated empirically.
    """
    _check_cov(cov)

    def draw(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        xy = _draw_bivariate(rng, cov, size)
        x, y = xy[:, 0], xy[:, 1]
        u = np.cos(x * x + y * y)
        v = np.sin(x * y)
        return u[:, None], v

    return draw
