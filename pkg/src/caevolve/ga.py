"""Genetic-algorithm engine over rule-table genomes.

One generation: evaluate the population, build a parent pool of the best
20% plus an equal number of random members, produce two children per
crossover from random parent pairs, evaluate the children, mutate every
child, re-evaluate, then select survivors from children plus members (best
20%, rest filled at random).  The best pool member always survives, so the
best fitness per generation never increases.

All randomness flows from a single seeded generator consumed in a fixed
order each generation: parent selection, crossover pair by pair, mutation in
offspring index order, survivor selection.  Fitness evaluation consumes no
randomness, so runs are reproducible for any evaluation thread count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .ca import RuleTable, TABLE_SIZE, random_rule
from .fitness import Evaluator, FitnessValue
from .grid import BinaryGrid

CrossoverFn = Callable[[RuleTable, RuleTable, np.random.Generator], tuple[RuleTable, RuleTable]]

# sums of two distinct powers of two are the composite indices zeroed by type-2 mutation
_POWERS = np.array([1 << i for i in range(9)], dtype=np.int64)


@dataclass(frozen=True)
class Individual:
    """A rule-table genome plus its cached fitness (None = not evaluated)."""

    genome: RuleTable
    fitness: FitnessValue | None = None


@dataclass
class Population:
    members: list[Individual]
    generation: int = 0
    seed: int = 0


@dataclass(frozen=True)
class EvolutionConfig:
    """Knobs for one evolution run; defaults give the best-performing setup
    (two-point crossover, fitness-adaptive mutation, 5 generations, pop 10)."""

    population_size: int = 10
    generations: int = 5
    passes: int = 1
    crossover: str = "two_point"
    mutation: str = "type1"
    elite_fraction: float = 0.2
    survivor_best_fraction: float = 0.2
    mutation_gate: float = 0.5
    stagnation_window: int = 2
    mutation_zero_scale: float = 0.25
    mutation_push_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 4:
            raise ValueError(f"population_size must be >= 4, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")
        if self.crossover not in ("one_point", "two_point"):
            raise ValueError(f"unknown crossover {self.crossover!r}")
        if self.mutation not in ("type1", "type2"):
            raise ValueError(f"unknown mutation {self.mutation!r}")
        for name in ("elite_fraction", "survivor_best_fraction"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {value}")
        if not 0.0 <= self.mutation_gate <= 1.0:
            raise ValueError(f"mutation_gate must be in [0, 1], got {self.mutation_gate}")
        if self.stagnation_window < 1:
            raise ValueError(f"stagnation_window must be >= 1, got {self.stagnation_window}")
        if self.mutation_zero_scale <= 0 or self.mutation_push_scale <= 0:
            raise ValueError("mutation scales must be > 0")
        elite = math.ceil(self.elite_fraction * self.population_size)
        if 2 * elite > self.population_size:
            raise ValueError(
                f"elite_fraction {self.elite_fraction} leaves fewer than "
                f"{elite} non-elite members to draw random parents from"
            )


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: int
    average_fitness: float
    elapsed: float


class EvolutionResult(NamedTuple):
    best: Individual
    stats: list[GenerationStats]
    population: Population


def _require_evaluated(members: list[Individual], what: str) -> None:
    for i, member in enumerate(members):
        if member.fitness is None:
            raise ValueError(f"unevaluated {what} at index {i}")


def select_parents(
    pop: Population, rng: np.random.Generator, elite_fraction: float = 0.2
) -> list[Individual]:
    """Elite parents plus an equal count of random non-elite members.

    Elites are the ceil(elite_fraction * N) best by fitness, ties broken by
    lower member index; the random slots are drawn uniformly without
    replacement from the remaining members, so the pool has no duplicates.
    """
    members = pop.members
    _require_evaluated(members, "member")
    n_elite = math.ceil(elite_fraction * len(members))
    order = sorted(range(len(members)), key=lambda i: (members[i].fitness.distance, i))
    elite_idx = order[:n_elite]
    rest = [i for i in range(len(members)) if i not in set(elite_idx)]
    if len(rest) < n_elite:
        raise ValueError(
            f"cannot draw {n_elite} random parents from {len(rest)} non-elite members"
        )
    picks = rng.choice(len(rest), size=n_elite, replace=False)
    return [members[i] for i in elite_idx] + [members[rest[int(p)]] for p in picks]


def crossover_one_point(
    p1: RuleTable, p2: RuleTable, rng: np.random.Generator
) -> tuple[RuleTable, RuleTable]:
    """Cut both genomes at one point drawn from 1..511 and swap the tails."""
    k = int(rng.integers(1, TABLE_SIZE))
    a, b = p1.entries, p2.entries
    child1 = np.concatenate([a[:k], b[k:]])
    child2 = np.concatenate([b[:k], a[k:]])
    return RuleTable(child1), RuleTable(child2)


def crossover_two_point(
    p1: RuleTable, p2: RuleTable, rng: np.random.Generator
) -> tuple[RuleTable, RuleTable]:
    """Swap the middle segment [k1, k2) between the genomes, with the two
    distinct cut points drawn uniformly from 1..511."""
    k1, k2 = sorted(int(k) for k in rng.choice(np.arange(1, TABLE_SIZE), size=2, replace=False))
    a, b = p1.entries, p2.entries
    child1 = np.concatenate([a[:k1], b[k1:k2], a[k2:]])
    child2 = np.concatenate([b[:k1], a[k1:k2], b[k2:]])
    return RuleTable(child1), RuleTable(child2)


def make_offspring(
    pool: list[Individual],
    count: int,
    rng: np.random.Generator,
    crossover: CrossoverFn = crossover_two_point,
) -> list[Individual]:
    """`count` children from `count // 2` crossovers of random parent pairs."""
    if len(pool) < 2:
        raise ValueError(f"parent pool must hold >= 2 individuals, got {len(pool)}")
    if count % 2:
        raise ValueError(f"offspring count must be even, got {count}")
    offspring: list[Individual] = []
    for _ in range(count // 2):
        i, j = (int(k) for k in rng.choice(len(pool), size=2, replace=False))
        c1, c2 = crossover(pool[i].genome, pool[j].genome, rng)
        offspring.append(Individual(c1))
        offspring.append(Individual(c2))
    return offspring


def _with_entries(ind: Individual, entries: np.ndarray) -> Individual:
    if np.array_equal(entries, ind.genome.entries):
        return ind
    return Individual(RuleTable(entries))


def mutate_type1(
    ind: Individual,
    normalized_fitness: float,
    stagnant: bool,
    rng: np.random.Generator,
    *,
    gate: float = 0.5,
    zero_scale: float = 0.25,
    push_scale: float = 1.0,
) -> Individual:
    """Fitness-adaptive zeroing with a stagnation escape.

    Normally a single gate draw decides whether to mutate at all; when it
    fires, ceil(normalized_fitness * zero_scale * 512) genes currently at 1
    are drawn without replacement and set to 0, so worse individuals lose
    more ones.  When the run is stagnant the gate is skipped and
    ceil(normalized_fitness * push_scale * 512) genes currently at 0 are
    instead set to 1, pushing the individual away from the current optimum.
    Either count is capped by how many genes can actually flip.

    Returns the individual unchanged (cached fitness intact) when nothing
    flips; otherwise the result carries no fitness.
    """
    if stagnant:
        n = math.ceil(normalized_fitness * push_scale * TABLE_SIZE)
        flippable = np.flatnonzero(ind.genome.entries == 0)
        value = 1
    else:
        if rng.random() >= gate:
            return ind
        n = math.ceil(normalized_fitness * zero_scale * TABLE_SIZE)
        flippable = np.flatnonzero(ind.genome.entries == 1)
        value = 0
    n = min(n, len(flippable))
    if n == 0:
        return ind
    idx = flippable[rng.choice(len(flippable), size=n, replace=False)]
    entries = ind.genome.entries.copy()
    entries[idx] = value
    return _with_entries(ind, entries)


def mutate_type2(
    ind: Individual, rng: np.random.Generator, *, gate: float = 0.5
) -> Individual:
    """Zero the nine single-power-of-two entries plus four random entries at
    sums of two distinct powers, behind one gate draw.

    Every touched index is < 512 (the largest pair sum is 256 + 128), so at
    most 13 entries change.
    """
    if rng.random() >= gate:
        return ind
    entries = ind.genome.entries.copy()
    entries[_POWERS] = 0
    for _ in range(4):
        i, j = rng.choice(9, size=2, replace=False)
        entries[int(_POWERS[i] + _POWERS[j])] = 0
    return _with_entries(ind, entries)


def select_survivors(
    parents_and_offspring: list[Individual],
    target_size: int,
    rng: np.random.Generator,
    best_fraction: float = 0.2,
) -> list[Individual]:
    """Keep the ceil(best_fraction * target_size) best of the combined pool
    (ties by lower pool index), then fill to target_size uniformly without
    replacement from the remainder."""
    pool = parents_and_offspring
    if len(pool) < target_size:
        raise ValueError(f"survivor pool of {len(pool)} cannot fill {target_size} slots")
    _require_evaluated(pool, "survivor candidate")
    n_best = math.ceil(best_fraction * target_size)
    order = sorted(range(len(pool)), key=lambda i: (pool[i].fitness.distance, i))
    best_idx = order[:n_best]
    rest = [i for i in range(len(pool)) if i not in set(best_idx)]
    fill = target_size - n_best
    picks = rng.choice(len(rest), size=fill, replace=False)
    return [pool[i] for i in best_idx] + [pool[rest[int(p)]] for p in picks]


def _evaluated(members: list[Individual], evaluator: Evaluator) -> list[Individual]:
    values = evaluator.evaluate_many([m.genome for m in members])
    return [Individual(m.genome, v) for m, v in zip(members, values)]


def evolve(
    config: EvolutionConfig,
    start: BinaryGrid,
    goal: BinaryGrid,
    *,
    threads: int = 1,
    evaluator: Evaluator | None = None,
) -> EvolutionResult:
    """Run the full generation loop and return the best individual ever to
    enter survivor selection, per-generation stats, and the final population.

    Stats are recorded after survivor selection, i.e. they describe the
    population that enters the next generation; `best_fitness` is therefore
    non-increasing.  Stagnation (driving the type-1 mutation escape) means
    the start-of-generation best fitness has not improved for
    `stagnation_window` consecutive generations.
    """
    if evaluator is None:
        evaluator = Evaluator(start, goal, config.passes, threads)
    crossover = (
        crossover_one_point if config.crossover == "one_point" else crossover_two_point
    )
    rng = np.random.default_rng(config.seed)
    members = [Individual(random_rule(rng)) for _ in range(config.population_size)]

    stats: list[GenerationStats] = []
    best_ever: Individual | None = None
    prev_best: int | None = None
    stale = 0

    for gen in range(config.generations):
        t0 = time.perf_counter()
        members = _evaluated(members, evaluator)

        start_best = min(m.fitness.distance for m in members)
        if prev_best is not None and start_best == prev_best:
            stale += 1
        else:
            stale = 0
        prev_best = start_best
        stagnant = stale >= config.stagnation_window

        pool = select_parents(
            Population(members, gen, config.seed), rng, config.elite_fraction
        )
        offspring = make_offspring(pool, 2 * len(pool), rng, crossover)
        offspring = _evaluated(offspring, evaluator)

        if config.mutation == "type1":
            offspring = [
                mutate_type1(
                    o,
                    o.fitness.normalized,
                    stagnant,
                    rng,
                    gate=config.mutation_gate,
                    zero_scale=config.mutation_zero_scale,
                    push_scale=config.mutation_push_scale,
                )
                for o in offspring
            ]
        else:
            offspring = [
                mutate_type2(o, rng, gate=config.mutation_gate) for o in offspring
            ]
        offspring = _evaluated(offspring, evaluator)

        combined = offspring + members
        members = select_survivors(
            combined, config.population_size, rng, config.survivor_best_fraction
        )

        pool_best = min(combined, key=lambda m: m.fitness.distance)
        if best_ever is None or pool_best.fitness.distance < best_ever.fitness.distance:
            best_ever = pool_best

        distances = [m.fitness.distance for m in members]
        stats.append(
            GenerationStats(
                generation=gen,
                best_fitness=min(distances),
                average_fitness=sum(distances) / len(distances),
                elapsed=time.perf_counter() - t0,
            )
        )

    final = Population(members, generation=config.generations, seed=config.seed)
    return EvolutionResult(best_ever, stats, final)
