"""Estimation of the general half-normal distribution HN(xi, eta).

Library surface:

- ``dist``: the distribution object, sampling, and the pair samplers used
  by the conditional-expectation studies.
- ``specfun``: the self-contained special-function kernel (normal
  CDF/quantile, log-gamma, incomplete beta, Student-t tails, adaptive
  quadrature, expected-minimum constants).
- ``estimators``: unbiased, maximum-likelihood, minimum-risk-equivariant,
  and known-parameter estimators in closed form.
- ``condexp``: Monte Carlo conditional expectations by epsilon-ball
  acceptance, box-kernel regression, and rejection-ABC posteriors.
- ``mre_location``: the constructive sampler and the Monte Carlo
  approximation of the equivariant-optimal location estimator.
- ``simharness`` / ``report``: seeded replication studies and their
  CSV/JSON serialization.
- ``cli``: the ``halfnormal`` command.
"""

from .dist import HalfNormalParams, Sample, mean_var, pdf, sample
from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    DomainError,
    EmptyWindowError,
    HalfNormalError,
    InsufficientAcceptanceError,
    QuadratureError,
    TieError,
)
from .rng import RngSeed, derive_generator

__version__ = "0.1.0"

__all__ = [
    "HalfNormalParams",
    "Sample",
    "pdf",
    "mean_var",
    "sample",
    "RngSeed",
    "derive_generator",
    "HalfNormalError",
    "DomainError",
    "DegenerateSampleError",
    "TieError",
    "ConvergenceError",
    "QuadratureError",
    "InsufficientAcceptanceError",
    "EmptyWindowError",
    "__version__",
]
