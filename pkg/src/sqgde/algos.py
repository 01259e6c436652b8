"""Differential evolution variants and stochastic quasi-gradient descent.

Three DE mutation strategies are supported under one generational loop:

* ``rand1exp``: difference-vector mutation around a random member with
  exponential crossover (classic DE/rand/1/exp),
* ``best2bin``: two difference vectors around the population best with
  binomial crossover (DE/best/2/bin),
* ``sqgbin``: a quasi-gradient mutant built from fitness differences over
  ``w`` member pairs around the population best, with binomial crossover.

``run_sqg`` is a standalone normalized quasi-gradient descent with a warm
start drawn from a uniform sample. All loops stop exactly at the
evaluation budget; a generation interrupted mid-way keeps the selections
already decided and discards the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BudgetedEvaluator,
    BudgetExhausted,
    Individual,
    Population,
    RngStream,
    RunTrace,
    best_index,
    init_population,
    make_rng,
)

__all__ = [
    "InsufficientPopulation",
    "STRATEGIES",
    "DEConfig",
    "SQGConfig",
    "sample_distinct_indices",
    "mutate_rand1",
    "mutate_best2",
    "sqg_mutant",
    "sqg_donor",
    "crossover_binomial",
    "crossover_exponential",
    "greedy_select",
    "sqg_gradient_estimate",
    "run_de",
    "run_sqg",
]


class InsufficientPopulation(ValueError):
    """Not enough distinct members to sample the requested indices."""


STRATEGIES = ("rand1exp", "best2bin", "sqgbin")

# Minimum members beyond the target each mutation needs to sample.
_MIN_POP = {"rand1exp": 4, "best2bin": 6}


@dataclass(frozen=True)
class DEConfig:
    """Differential evolution settings.

    ``w`` (number of quasi-gradient pairs) is only used by the ``sqgbin``
    strategy; values between 2 and 5 work well, and high ``w`` should be
    avoided with very small populations because each mutant consumes
    ``2 w`` distinct members.
    """

    strategy: str
    F: float = 0.8
    CR: float = 0.8
    w: int = 5
    pop_size: int = 100

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if not 0.0 <= self.F <= 2.0:
            raise ValueError("F must lie in [0, 2]")
        if not 0.0 <= self.CR <= 1.0:
            raise ValueError("CR must lie in [0, 1]")
        if self.strategy == "sqgbin":
            if self.w < 1:
                raise ValueError("w must be at least 1")
            if self.pop_size < 2 * self.w + 2:
                raise ValueError(f"sqgbin with w={self.w} needs pop_size >= {2 * self.w + 2}")
        elif self.pop_size < _MIN_POP[self.strategy]:
            raise ValueError(f"{self.strategy} needs pop_size >= {_MIN_POP[self.strategy]}")


@dataclass(frozen=True)
class SQGConfig:
    """Quasi-gradient descent settings.

    Each iteration spends r + 1 evaluations: one at the current point plus
    one per perturbation. The step length decays geometrically from
    ``step0`` times the mean bound range.
    """

    r: int = 5
    delta: float = 1e-3
    step0: float = 0.015
    decay: float = 0.96
    warm_start_samples: int = 100

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.step0 <= 0:
            raise ValueError("step0 must be positive")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        if self.warm_start_samples < 1:
            raise ValueError("warm_start_samples must be at least 1")


def sample_distinct_indices(pop_size: int, k: int, exclude: set[int], rng: RngStream) -> list[int]:
    """k distinct indices from range(pop_size) avoiding ``exclude``.

    Uniform over the valid index subsets; raises InsufficientPopulation if
    fewer than k candidates remain.
    """
    candidates = [i for i in range(pop_size) if i not in exclude]
    if k > len(candidates):
        raise InsufficientPopulation(
            f"need {k} distinct indices but only {len(candidates)} are available"
        )
    picked = rng.choice(len(candidates), size=k, replace=False)
    return [candidates[int(j)] for j in picked]


def mutate_rand1(pop: Population, target: int, F: float, rng: RngStream) -> np.ndarray:
    """Donor x_a + F (x_b - x_c) over three distinct non-target members."""
    a, b, c = sample_distinct_indices(pop.size, 3, {target}, rng)
    m = pop.members
    return m[a].genome + F * (m[b].genome - m[c].genome)


def mutate_best2(pop: Population, target: int, F: float, rng: RngStream) -> np.ndarray:
    """Donor x_best + F ((x_a - x_b) + (x_c - x_d)), indices distinct, non-target."""
    a, b, c, d = sample_distinct_indices(pop.size, 4, {target}, rng)
    m = pop.members
    x_best = m[best_index(pop)].genome
    return x_best + F * ((m[a].genome - m[b].genome) + (m[c].genome - m[d].genome))


def _pair_sums(pairs):
    """Weighted sum S and plain difference sum over ((x_b, y_b), (x_c, y_c)) pairs."""
    (xb0, _), _ = pairs[0]
    s = np.zeros_like(np.asarray(xb0, dtype=float))
    sum_diff = np.zeros_like(s)
    for (xb, yb), (xc, yc) in pairs:
        diff = np.asarray(xb, dtype=float) - np.asarray(xc, dtype=float)
        dist = float(np.linalg.norm(diff))
        if dist == 0.0:
            raise ValueError("quasi-gradient pair has identical points")
        s += ((float(yb) - float(yc)) / dist) * diff
        sum_diff += diff
    return s, sum_diff


def _sqg_fallback(x_best: np.ndarray, pairs, F: float) -> np.ndarray:
    # Plain difference-sum step; safe even when fitness gaps vanish.
    sum_diff = np.zeros_like(np.asarray(x_best, dtype=float))
    for (xb, _), (xc, _) in pairs:
        sum_diff += np.asarray(xb, dtype=float) - np.asarray(xc, dtype=float)
    return np.asarray(x_best, dtype=float) + (F / len(pairs)) * sum_diff


def sqg_mutant(x_best: np.ndarray, pairs, F: float, eps_den: float = 0.0) -> np.ndarray:
    """Fitness-difference weighted mutant around the population best.

    Each pair ((x_b, y_b), (x_c, y_c)) contributes its difference vector
    weighted by the fitness gap per unit distance. The weighted sum S is
    rescaled by phi = (||sum of differences|| / w) / ||S||, so the step
    length always equals the mean difference-vector length regardless of
    the fitness scale, and the direction descends the quasi-gradient:

        donor = x_best - F * phi * S

    When ||S|| is at or below ``eps_den`` (all fitness gaps cancel), the
    mutant falls back to a plain mean-difference step from x_best.
    """
    x_best = np.asarray(x_best, dtype=float)
    if not pairs:
        raise ValueError("at least one pair is required")
    w = len(pairs)
    s, sum_diff = _pair_sums(pairs)
    norm_s = float(np.linalg.norm(s))
    if norm_s <= eps_den:
        return x_best + (F / w) * sum_diff
    phi = (float(np.linalg.norm(sum_diff)) / w) / norm_s
    return x_best - F * phi * s


def sqg_donor(
    pop: Population,
    target: int,
    best: int,
    w: int,
    F: float,
    rng: RngStream,
    eps_pair: float = 0.0,
    eps_den: float = 0.0,
) -> np.ndarray:
    """Sample w member pairs and build the quasi-gradient donor.

    A pair whose points coincide (within ``eps_pair``) is resampled up to
    pop_size times while keeping all pair members distinct; if degenerate
    pairs persist (e.g. a converged population), the fallback
    mean-difference step is used instead.
    """
    m = pop.members
    x_best = m[best].genome
    idx = sample_distinct_indices(pop.size, 2 * w, {target}, rng)
    pair_idx = [(idx[2 * k], idx[2 * k + 1]) for k in range(w)]
    used = set(idx) | {target}

    def pair_length(p):
        return float(np.linalg.norm(m[p[0]].genome - m[p[1]].genome))

    degenerate = False
    for k in range(w):
        retries = 0
        while pair_length(pair_idx[k]) <= eps_pair:
            if retries >= pop.size:
                degenerate = True
                break
            b, c = pair_idx[k]
            used.discard(b)
            used.discard(c)
            try:
                nb, nc = sample_distinct_indices(pop.size, 2, used, rng)
            except InsufficientPopulation:
                used.add(b)
                used.add(c)
                degenerate = True
                break
            used.add(nb)
            used.add(nc)
            pair_idx[k] = (nb, nc)
            retries += 1
        if degenerate:
            break

    pairs = [((m[b].genome, m[b].fitness), (m[c].genome, m[c].fitness)) for b, c in pair_idx]
    if degenerate:
        return _sqg_fallback(x_best, pairs, F)
    return sqg_mutant(x_best, pairs, F, eps_den=eps_den)


def crossover_binomial(target: np.ndarray, donor: np.ndarray, CR: float, rng: RngStream) -> np.ndarray:
    """Per-gene mixing; the forced index j_rand always comes from the donor."""
    d = target.size
    j_rand = int(rng.integers(d))
    take = rng.random(d) < CR
    take[j_rand] = True
    return np.where(take, donor, target)


def crossover_exponential(target: np.ndarray, donor: np.ndarray, CR: float, rng: RngStream) -> np.ndarray:
    """Copy a contiguous cyclic block from the donor.

    The block starts at a uniform index and grows while successive uniform
    draws stay below CR, capped at the full length. CR = 0 copies exactly
    one gene; CR = 1 copies the whole donor.
    """
    d = target.size
    start = int(rng.integers(d))
    length = 1
    while length < d and rng.random() < CR:
        length += 1
    trial = np.array(target, dtype=float, copy=True)
    idx = (start + np.arange(length)) % d
    trial[idx] = donor[idx]
    return trial


def greedy_select(target: Individual, trial: Individual) -> Individual:
    """Keep the better of target and trial; ties go to the trial."""
    if target.fitness is None or trial.fitness is None:
        raise ValueError("greedy selection needs evaluated individuals")
    return trial if trial.fitness <= target.fitness else target


def sqg_gradient_estimate(
    evaluator: BudgetedEvaluator, x: np.ndarray, r: int, delta: float, rng: RngStream
) -> np.ndarray:
    """Stochastic quasi-gradient from r uniform perturbation directions.

    xi = sum_k ((f(x + delta z_k) - f(x)) / delta) z_k with z_k uniform in
    [-1, 1]^D. Costs r + 1 evaluations; f(x) is evaluated once and reused.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    x = np.asarray(x, dtype=float)
    fx = evaluator.evaluate(x)
    xi = np.zeros_like(x)
    for _ in range(r):
        z = rng.uniform(-1.0, 1.0, x.size)
        fz = evaluator.evaluate(x + delta * z)
        xi += ((fz - fx) / delta) * z
    return xi


def _make_donor(
    config: DEConfig,
    pop: Population,
    target: int,
    best: int,
    rng: RngStream,
    eps_pair: float,
    eps_den: float,
) -> np.ndarray:
    if config.strategy == "rand1exp":
        return mutate_rand1(pop, target, config.F, rng)
    if config.strategy == "best2bin":
        return mutate_best2(pop, target, config.F, rng)
    return sqg_donor(pop, target, best, config.w, config.F, rng, eps_pair, eps_den)


def run_de(config: DEConfig, fn, t_max: int, seed: int) -> RunTrace:
    """One budgeted DE run; returns the best-so-far trace.

    The population is synchronous: donors are built from the current
    generation and survivors replace it wholesale. If the budget runs out
    mid-generation, selections already decided are kept and the remaining
    targets carry over unchanged.
    """
    rng = make_rng(seed)
    evaluator = BudgetedEvaluator(fn, t_max, rng)
    space = fn.space
    pop = init_population(space, config.pop_size, rng)

    evaluated: list[Individual] = []
    for ind in pop.members:
        try:
            ind.fitness = evaluator.evaluate(ind.genome)
        except BudgetExhausted:
            return evaluator.trace()
        evaluated.append(ind)
    pop = Population(evaluated, generation=0)

    eps_pair = 1e-12 * space.mean_range
    eps_den = 1e-12 * space.mean_range

    while not evaluator.exhausted:
        best = best_index(pop)
        new_members = list(pop.members)
        interrupted = False
        for i in range(pop.size):
            donor = _make_donor(config, pop, i, best, rng, eps_pair, eps_den)
            donor = space.clip(donor)
            if config.strategy == "rand1exp":
                trial_genome = crossover_exponential(pop.members[i].genome, donor, config.CR, rng)
            else:
                trial_genome = crossover_binomial(pop.members[i].genome, donor, config.CR, rng)
            try:
                trial_fitness = evaluator.evaluate(trial_genome)
            except BudgetExhausted:
                interrupted = True
                break
            new_members[i] = greedy_select(pop.members[i], Individual(trial_genome, trial_fitness))
        pop = Population(new_members, generation=pop.generation + 1)
        if interrupted:
            break
    return evaluator.trace()


def run_sqg(config: SQGConfig, fn, t_max: int, seed: int) -> RunTrace:
    """Budgeted quasi-gradient descent from the best of a uniform sample.

    Iterates x <- clip(x - rho_t * xi / ||xi||) with rho_t decaying
    geometrically from step0 times the mean bound range. A zero estimate
    skips the step but still advances the schedule.
    """
    rng = make_rng(seed)
    evaluator = BudgetedEvaluator(fn, t_max, rng)
    space = fn.space

    best_x: np.ndarray | None = None
    best_f = float("inf")
    for _ in range(config.warm_start_samples):
        x = space.sample_uniform(rng)
        try:
            f = evaluator.evaluate(x)
        except BudgetExhausted:
            return evaluator.trace()
        if f < best_f:
            best_f, best_x = f, x

    x = best_x
    step_scale = config.step0 * space.mean_range
    t = 0
    while True:
        try:
            xi = sqg_gradient_estimate(evaluator, x, config.r, config.delta, rng)
        except BudgetExhausted:
            return evaluator.trace()
        norm = float(np.linalg.norm(xi))
        if norm > 0.0:
            x = space.clip(x - (step_scale * config.decay ** t) * (xi / norm))
        t += 1
