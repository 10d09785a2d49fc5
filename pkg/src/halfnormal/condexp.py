"""Monte Carlo estimation of conditional expectations by epsilon-ball acceptance.

The estimator of E(Y | X = x): draw pairs (x_i, y_i), keep those with
max-norm distance ||x_i - x|| <= epsilon, and average the accepted y_i.
Drawing continues until a target number of accepted points is reached (the
experiment design used throughout the simulation tables) or a draw budget
is exhausted.  The same acceptance rule gives the rejection-ABC
approximations of posterior means and probabilities, and on a recorded
sample it coincides exactly with the Nadaraya-Watson regression estimate
under the box kernel with bandwidth epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dist import PairSampler
from .errors import DomainError, EmptyWindowError, InsufficientAcceptanceError
from .rng import RngSeed, derive_generator

__all__ = [
    "CondExpQuery",
    "CondExpResult",
    "DEFAULT_MAX_DRAWS",
    "estimate_cond_exp",
    "nadaraya_watson_at",
    "abc_posterior",
    "replay_pair_sampler",
]

#: Draw budget used when the caller does not say otherwise.  Large enough
#: that every experiment in the simulation tables reaches its acceptance
#: target first.
DEFAULT_MAX_DRAWS = 10**9

_CHUNK = 262_144


@dataclass(frozen=True)
class CondExpQuery:
    """One conditional-expectation estimate: condition at ``x`` with ball
    radius ``epsilon``, collecting ``target_in_ball`` accepted points."""

    x: tuple[float, ...]
    epsilon: float
    target_in_ball: int

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "x", x)
        if not all(math.isfinite(v) for v in x):
            raise DomainError(f"conditioning point must be finite, got {x}")
        if not self.epsilon > 0.0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")
        if self.target_in_ball < 1:
            raise DomainError(
                f"target_in_ball must be >= 1, got {self.target_in_ball}"
            )


@dataclass(frozen=True)
class CondExpResult:
    estimate: float
    accepted: int
    drawn: int
    sum_weights: int
    status: str  # "ok" when the acceptance target was met, else "partial"


def _accept_mask(xs: np.ndarray, x0: np.ndarray, epsilon: float) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    if xs.shape[1] != x0.size:
        raise DomainError(
            f"sampler returned {xs.shape[1]}-dimensional points for a "
            f"{x0.size}-dimensional conditioning point"
        )
    return np.max(np.abs(xs - x0[None, :]), axis=1) <= epsilon


def estimate_cond_exp(
    pair_sampler: PairSampler,
    query: CondExpQuery,
    max_draws: int = DEFAULT_MAX_DRAWS,
    seed: RngSeed | int = 0,
) -> CondExpResult:
    """Estimate E(Y | X = query.x) by epsilon-ball acceptance sampling.

    Draws from ``pair_sampler`` (in chunks, single stream, deterministic in
    ``seed``) until ``query.target_in_ball`` points fall inside the ball or
    ``max_draws`` pairs have been used.  Raises
    ``InsufficientAcceptanceError`` if nothing was accepted; returns a
    ``status="partial"`` result if some, but fewer than requested, were.
    """
    if max_draws < query.target_in_ball:
        raise DomainError(
            f"max_draws={max_draws} cannot reach target_in_ball="
            f"{query.target_in_ball}"
        )
    x0 = np.asarray(query.x, dtype=float)
    rng = derive_generator(seed)
    accepted_chunks: list[np.ndarray] = []
    accepted = 0
    drawn = 0
    while drawn < max_draws and accepted < query.target_in_ball:
        size = min(_CHUNK, max_draws - drawn)
        xs, ys = pair_sampler(rng, size)
        ys = np.asarray(ys, dtype=float)
        ok = _accept_mask(xs, x0, query.epsilon)
        hits = int(ok.sum())
        if accepted + hits >= query.target_in_ball:
            # Stop at the draw where the target was reached, as if sampling
            # one pair at a time.
            needed = query.target_in_ball - accepted
            cut = int(np.nonzero(ok)[0][needed - 1]) + 1
            ok = ok[:cut]
            ys = ys[:cut]
            size = cut
            hits = needed
        drawn += size
        if hits:
            accepted_chunks.append(ys[ok])
            accepted += hits
    if accepted == 0:
        raise InsufficientAcceptanceError(
            f"no draws within epsilon={query.epsilon} of x={query.x} "
            f"after {drawn} draws"
        )
    values = (
        accepted_chunks[0]
        if len(accepted_chunks) == 1
        else np.concatenate(accepted_chunks)
    )
    estimate = float(np.sum(values) / values.size)
    status = "ok" if accepted >= query.target_in_ball else "partial"
    return CondExpResult(estimate, accepted, drawn, accepted, status)


def nadaraya_watson_at(
    pairs: Sequence[tuple[float, float]] | np.ndarray, x: float, bandwidth: float
) -> float:
    """Box-kernel Nadaraya-Watson regression value at ``x``.

    With the indicator kernel on [-1, 1] this is the mean of the responses
    whose predictor lies within ``bandwidth`` of ``x`` -- the same quantity
    the acceptance-sampling estimator computes, evaluated on a fixed sample.
    """
    if not bandwidth > 0.0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"pairs must have shape (k, 2), got {arr.shape}")
    ok = np.abs(arr[:, 0] - x) <= bandwidth
    selected = arr[ok, 1]
    if selected.size == 0:
        raise EmptyWindowError(
            f"no observations within bandwidth {bandwidth} of x={x}"
        )
    return float(np.sum(selected) / selected.size)


def replay_pair_sampler(
    x_values: np.ndarray, y_values: np.ndarray
) -> PairSampler:
    """A pair sampler that replays a recorded sample in order.

    Lets the acceptance-sampling estimator run on a fixed dataset, e.g. to
    compare it against :func:`nadaraya_watson_at` on identical points.
    """
    xs = np.asarray(x_values, dtype=float)
    ys = np.asarray(y_values, dtype=float)
    if xs.shape[0] != ys.shape[0]:
        raise DomainError("x_values and y_values must have equal length")
    pos = 0

    def draw(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        nonlocal pos
        if pos + size > xs.shape[0]:
            raise DomainError("replay sampler exhausted; lower max_draws")
        sl = slice(pos, pos + size)
        pos += size
        return xs[sl], ys[sl]

    return draw


def abc_posterior(
    prior_sampler: Callable[[np.random.Generator, int], np.ndarray],
    data_sampler: Callable[[np.random.Generator, np.ndarray], np.ndarray],
    observed_x: Sequence[float] | float,
    epsilon: float,
    f: Callable[[np.ndarray], np.ndarray],
    t_indicator: Callable[[np.ndarray], np.ndarray],
    max_draws: int,
    seed: RngSeed | int = 0,
) -> tuple[float, float]:
    """Rejection-ABC approximation of a posterior mean and probability.

    Draws ``max_draws`` parameters from the prior, simulates data for each,
    and accepts those whose simulated data lands within ``epsilon`` of
    ``observed_x`` in max norm.  Returns the accepted-sample mean of
    ``f(theta)`` and the accepted fraction satisfying ``t_indicator``.
    """
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    if max_draws < 1:
        raise DomainError(f"max_draws must be >= 1, got {max_draws}")
    x0 = np.atleast_1d(np.asarray(observed_x, dtype=float))
    rng = derive_generator(seed)
    sum_f = 0.0
    sum_t = 0.0
    accepted = 0
    drawn = 0
    while drawn < max_draws:
        size = min(_CHUNK, max_draws - drawn)
        thetas = np.asarray(prior_sampler(rng, size))
        xs = data_sampler(rng, thetas)
        ok = _accept_mask(xs, x0, epsilon)
        drawn += size
        hits = int(ok.sum())
        if hits == 0:
            continue
        kept = thetas[ok]
        sum_f += float(np.sum(np.asarray(f(kept), dtype=float)))
        sum_t += float(np.sum(np.asarray(t_indicator(kept), dtype=float)))
        accepted += hits
    if accepted == 0:
        raise InsufficientAcceptanceError(
            f"no simulated dataset within epsilon={epsilon} of the observation "
            f"after {drawn} draws"
        )
    return sum_f / accepted, sum_t / accepted
