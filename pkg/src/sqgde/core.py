"""Core types for budgeted, reproducible minimization runs.

Everything downstream (test functions, optimizers, the benchmark harness)
shares these primitives: an axis-aligned search box, evaluated individuals,
a hard evaluation budget, and explicit seeded random streams.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "RngStream",
    "BudgetExhausted",
    "make_rng",
    "derive_seed",
    "SearchSpace",
    "Individual",
    "Population",
    "init_population",
    "best_index",
    "RunTrace",
    "BudgetedEvaluator",
]

# All randomness flows through explicitly seeded generators so that a run is
# fully determined by its seed.
RngStream = np.random.Generator


class BudgetExhausted(Exception):
    """An evaluation was requested after the budget was fully spent."""


def make_rng(seed: int) -> RngStream:
    """Deterministic stream: the same seed always yields the same draws."""
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master_seed: int, *parts: object) -> int:
    """Stable 64-bit sub-seed keyed by (master_seed, *parts).

    Uses a cryptographic hash of the string forms, so it is reproducible
    across processes and platforms and insensitive to dict ordering.
    """
    key = "|".join(str(p) for p in (master_seed, *parts))
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box in R^dim with strictly ordered bounds."""

    dim: int
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ValueError("bounds must have shape (dim,)")
        if not np.all(lower < upper):
            raise ValueError("lower bound must be strictly below upper bound per axis")

    @classmethod
    def box(cls, dim: int, lower: float, upper: float) -> "SearchSpace":
        return cls(dim, np.full(dim, float(lower)), np.full(dim, float(upper)))

    def clip(self, x: np.ndarray) -> np.ndarray:
        """Project a point onto the box, component-wise."""
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample_uniform(self, rng: RngStream) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)

    @property
    def mean_range(self) -> float:
        return float(np.mean(self.upper - self.lower))


@dataclass
class Individual:
    """A candidate point; fitness is None while evaluation is pending."""

    genome: np.ndarray
    fitness: float | None = None


@dataclass
class Population:
    members: list[Individual]
    generation: int = 0

    @property
    def size(self) -> int:
        return len(self.members)

    def fitness_values(self) -> np.ndarray:
        vals = [m.fitness for m in self.members]
        if any(v is None for v in vals):
            raise ValueError("population has pending (unevaluated) members")
        return np.asarray(vals, dtype=float)


def init_population(space: SearchSpace, pop_size: int, rng: RngStream) -> Population:
    """Uniform random population inside the box; fitness left pending."""
    if pop_size < 1:
        raise ValueError("pop_size must be at least 1")
    members = [Individual(space.sample_uniform(rng)) for _ in range(pop_size)]
    return Population(members, generation=0)


def best_index(pop: Population) -> int:
    """Index of the lowest fitness; ties go to the lowest index."""
    return int(np.argmin(pop.fitness_values()))


@dataclass(frozen=True)
class RunTrace:
    """Best-so-far history of one run.

    ``points`` holds (evaluation index, best fitness) at every strict
    improvement, in evaluation order; ``final_evals`` is the total number of
    evaluations consumed. Between recorded points the best-so-far value is
    piecewise constant.
    """

    points: tuple[tuple[int, float], ...]
    final_evals: int

    def __post_init__(self):
        pts = tuple((int(e), float(f)) for e, f in self.points)
        object.__setattr__(self, "points", pts)
        last_e, last_f = 0, float("inf")
        for e, f in pts:
            if e <= last_e:
                raise ValueError("trace evaluation indices must strictly increase")
            if f > last_f:
                raise ValueError("trace fitness must be non-increasing")
            last_e, last_f = e, f
        if pts and pts[-1][0] > self.final_evals:
            raise ValueError("trace points exceed final evaluation count")

    @property
    def final_best(self) -> float:
        return self.points[-1][1] if self.points else float("inf")

    def first_crossing(self, target: float) -> int | None:
        """First evaluation index with best fitness strictly below target."""
        for e, f in self.points:
            if f < target:
                return e
        return None

    def best_at(self, eval_index: int) -> float:
        """Best-so-far after ``eval_index`` evaluations (inf before the first)."""
        best = float("inf")
        for e, f in self.points:
            if e <= eval_index:
                best = f
            else:
                break
        return best


class BudgetedEvaluator:
    """Wraps an objective with a hard evaluation budget and improvement log.

    The wrapped callable is invoked as ``fn(genome, rng)``; the stream is
    used for stochastic objectives (noise draws). Once ``t_max`` evaluations
    have been spent, every further request raises :class:`BudgetExhausted`.
    """

    def __init__(self, fn: Callable, t_max: int, rng: RngStream | None = None):
        if t_max < 1:
            raise ValueError("t_max must be at least 1")
        self.fn = fn
        self.t_max = int(t_max)
        self.rng = rng
        self.used = 0
        self.best_so_far = float("inf")
        self._points: list[tuple[int, float]] = []

    @property
    def exhausted(self) -> bool:
        return self.used >= self.t_max

    @property
    def remaining(self) -> int:
        return self.t_max - self.used

    def evaluate(self, genome: np.ndarray) -> float:
        if self.used >= self.t_max:
            raise BudgetExhausted(f"budget of {self.t_max} evaluations spent")
        value = float(self.fn(genome, self.rng))
        self.used += 1
        if value < self.best_so_far:
            self.best_so_far = value
            self._points.append((self.used, value))
        return value

    def trace(self) -> RunTrace:
        points = list(self._points)
        # Close the trace with the final state so consumers see the run end.
        if points and points[-1][0] != self.used:
            points.append((self.used, self.best_so_far))
        return RunTrace(tuple(points), self.used)
