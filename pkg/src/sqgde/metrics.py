"""Budget-aware performance metrics.

Success is defined against a random-search reference: the target value for
a function is the expected best fitness a uniform random sampler reaches
with the same evaluation budget. Expected running time then measures how
many evaluations an algorithm needs, on average, to first beat that
target, penalized for unsuccessful runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RunTrace, make_rng

__all__ = [
    "NormalizationUndefined",
    "ErtResult",
    "expected_running_time",
    "RseTarget",
    "estimate_rse_target",
    "bnfv_curve",
    "bnfv_on_grid",
]


class NormalizationUndefined(ValueError):
    """The normalization target is zero, so normalized fitness is undefined."""


@dataclass(frozen=True)
class ErtResult:
    """Expected running time against a fitness target.

    When no run succeeds the true ERT is unbounded; ``value`` then holds
    the lower bound t_max * n_total and ``lower_bound`` is True.
    """

    value: float
    lower_bound: bool
    success_rate: float
    n_success: int
    n_total: int


def expected_running_time(traces: list[RunTrace], f_target: float, t_max: int) -> ErtResult:
    """mean(T_success) + ((1 - p_s) / p_s) * t_max over a batch of runs.

    T for a successful run is the first evaluation index whose best-so-far
    fitness falls strictly below ``f_target``.
    """
    if not traces:
        raise ValueError("at least one trace is required")
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    times = [tr.first_crossing(f_target) for tr in traces]
    successes = [t for t in times if t is not None]
    n_total = len(traces)
    n_success = len(successes)
    if n_success == 0:
        return ErtResult(float(t_max * n_total), True, 0.0, 0, n_total)
    p_s = n_success / n_total
    value = float(np.mean(successes) + ((1.0 - p_s) / p_s) * t_max)
    return ErtResult(value, False, p_s, n_success, n_total)


@dataclass(frozen=True)
class RseTarget:
    """Expected best fitness of uniform random search at a given budget."""

    function_label: str
    budget: int
    reps: int
    value: float


def estimate_rse_target(fn, budget: int, reps: int, seed: int) -> RseTarget:
    """Monte Carlo estimate: mean over reps of (best of ``budget`` uniform draws).

    Noisy objectives are sampled as an optimizer would observe them, with
    noise drawn from the same stream as the sample points.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rng = make_rng(seed)
    space = fn.space
    total = 0.0
    for _ in range(reps):
        best = float("inf")
        for _ in range(budget):
            value = fn(space.sample_uniform(rng), rng)
            if value < best:
                best = value
        total += best
    return RseTarget(getattr(fn, "label", "custom"), int(budget), int(reps), total / reps)


def bnfv_curve(trace: RunTrace, target: RseTarget) -> list[tuple[int, float]]:
    """Best fitness normalized by the random-search target, per trace point."""
    if target.value == 0.0:
        raise NormalizationUndefined(
            f"random-search target for {target.function_label} is zero; report raw best fitness instead"
        )
    return [(e, f / target.value) for e, f in trace.points]


def bnfv_on_grid(trace: RunTrace, target: RseTarget, grid) -> np.ndarray:
    """Normalized best-so-far sampled on an evaluation grid (piecewise constant)."""
    if target.value == 0.0:
        raise NormalizationUndefined(
            f"random-search target for {target.function_label} is zero; report raw best fitness instead"
        )
    return np.array([trace.best_at(int(e)) / target.value for e in grid])
