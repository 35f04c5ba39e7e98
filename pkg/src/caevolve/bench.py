"""Throughput harness: wall time for one full evolution generation.

A single generation covers member evaluation, parent selection, crossover,
offspring evaluation, mutation, re-evaluation, and survivor selection on a
random start/goal pair.  The timed path is the normal engine; the harness
adds no behavioral flags.  For 256x256 grids the report includes a speedup
ratio against a 56.1 s reference single-threaded measurement of the same
workload shape.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import numpy as np

from .fitness import Evaluator
from .ga import EvolutionConfig, evolve
from .grid import BinaryGrid

# reference wall-clock seconds for one generation on a 256x256 grid
REFERENCE_SECONDS_256 = 56.1
_REFERENCE_DIMS = (256, 256)


@dataclass(frozen=True)
class BenchReport:
    width: int
    height: int
    pop_size: int
    passes: int
    threads: int
    reps: int
    median_seconds: float
    min_seconds: float
    max_seconds: float
    cells_per_second: float
    reference_ratio: float | None


def _random_grid(rng: np.random.Generator, width: int, height: int) -> BinaryGrid:
    return BinaryGrid(width, height, rng.integers(0, 2, size=height * width, dtype=np.uint8))


def bench_generation(
    width: int,
    height: int,
    pop_size: int = 10,
    passes: int = 1,
    seed: int = 0,
    reps: int = 5,
    threads: int = 1,
) -> BenchReport:
    """Time one generation `reps` times and report the median.

    Each repetition reruns the identical seeded generation with a fresh
    fitness cache, so every repetition does the same work.
    """
    if width < 16 or height < 16:
        raise ValueError(f"bench dimensions must be >= 16, got {width}x{height}")
    if reps < 5:
        raise ValueError(f"reps must be >= 5, got {reps}")
    rng = np.random.default_rng(seed)
    start = _random_grid(rng, width, height)
    goal = _random_grid(rng, width, height)
    config = EvolutionConfig(
        population_size=pop_size, generations=1, passes=passes, seed=seed
    )

    times: list[float] = []
    cells = 0
    for _ in range(reps):
        evaluator = Evaluator(start, goal, passes, threads)
        result = evolve(config, start, goal, evaluator=evaluator)
        times.append(result.stats[0].elapsed)
        cells = evaluator.cells_processed  # identical every repetition

    median = statistics.median(times)
    ratio = REFERENCE_SECONDS_256 / median if (width, height) == _REFERENCE_DIMS else None
    return BenchReport(
        width=width,
        height=height,
        pop_size=pop_size,
        passes=passes,
        threads=threads,
        reps=reps,
        median_seconds=median,
        min_seconds=min(times),
        max_seconds=max(times),
        cells_per_second=cells / median if median > 0 else float("inf"),
        reference_ratio=ratio,
    )


def format_report(report: BenchReport) -> str:
    """One fixed-schema line per configuration."""
    ratio = "n/a" if report.reference_ratio is None else f"{report.reference_ratio:.1f}x"
    return (
        f"bench width={report.width} height={report.height} pop={report.pop_size} "
        f"passes={report.passes} threads={report.threads} reps={report.reps} "
        f"median_s={report.median_seconds:.6f} min_s={report.min_seconds:.6f} "
        f"max_s={report.max_seconds:.6f} cells_per_s={report.cells_per_second:.3e} "
        f"vs_reference={ratio}"
    )
