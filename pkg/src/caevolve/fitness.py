"""Fitness scoring: apply a rule table to the start image, compare to the goal.

Fitness is the Hamming distance between the transformed start image and the
goal image; lower is better, 0 means the goal was reproduced exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .ca import RuleTable, run
from .grid import BinaryGrid, DimensionMismatchError, hamming


@dataclass(frozen=True)
class FitnessValue:
    """Hamming distance to the goal plus its normalized form in [0, 1]."""

    distance: int
    normalized: float


def evaluate(
    rule: RuleTable, start: BinaryGrid, goal: BinaryGrid, passes: int = 1
) -> FitnessValue:
    """Score one rule table: hamming(run(start, rule, passes), goal)."""
    if (start.width, start.height) != (goal.width, goal.height):
        raise DimensionMismatchError(
            f"start {start.width}x{start.height} vs goal {goal.width}x{goal.height}"
        )
    distance = hamming(run(start, rule, passes), goal)
    return FitnessValue(distance, distance / (start.width * start.height))


class Evaluator:
    """Scores rule tables against a fixed start/goal pair.

    Results are memoized by genome bytes (scoring is a pure function of the
    genome for fixed images and pass count).  With ``threads > 1`` uncached
    genomes are scored on a thread pool; results are identical for any thread
    count because evaluations share no mutable state and are merged in input
    order.
    """

    def __init__(
        self, start: BinaryGrid, goal: BinaryGrid, passes: int = 1, threads: int = 1
    ) -> None:
        if (start.width, start.height) != (goal.width, goal.height):
            raise DimensionMismatchError(
                f"start {start.width}x{start.height} vs goal {goal.width}x{goal.height}"
            )
        if passes < 1:
            raise ValueError(f"passes must be >= 1, got {passes}")
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.start = start
        self.goal = goal
        self.passes = passes
        self.threads = threads
        self._cache: dict[bytes, FitnessValue] = {}
        # count of cell updates actually computed (cache hits excluded)
        self.cells_processed = 0

    def _compute(self, rule: RuleTable) -> FitnessValue:
        return evaluate(rule, self.start, self.goal, self.passes)

    def evaluate(self, rule: RuleTable) -> FitnessValue:
        return self.evaluate_many([rule])[0]

    def evaluate_many(self, rules: Sequence[RuleTable]) -> list[FitnessValue]:
        """Score rules in order; uncached ones may run concurrently."""
        keys = [rule.entries.tobytes() for rule in rules]
        missing_idx = [i for i, k in enumerate(keys) if k not in self._cache]
        # dedupe so one genome is never computed twice in the same batch
        todo: dict[bytes, RuleTable] = {}
        for i in missing_idx:
            todo.setdefault(keys[i], rules[i])
        todo_rules = list(todo.values())
        if todo_rules:
            if self.threads > 1 and len(todo_rules) > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    results = list(pool.map(self._compute, todo_rules))
            else:
                results = [self._compute(r) for r in todo_rules]
            for key, value in zip(todo.keys(), results):
                self._cache[key] = value
            self.cells_processed += (
                len(todo_rules) * self.passes * self.start.width * self.start.height
            )
        return [self._cache[k] for k in keys]
