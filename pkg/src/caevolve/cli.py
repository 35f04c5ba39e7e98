"""Command-line surface: evolve, apply, score, init-pop, bench.

Exit codes: 0 success, 1 usage error, 2 I/O or file-format error,
3 image dimension mismatch.  Every command is deterministic given its flags;
wall-clock timing in the stats CSV is opt-in (--timing) so that repeated runs
with the same seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import bench_generation, format_report
from .ca import random_rule, run
from .fitness import evaluate
from .ga import EvolutionConfig, GenerationStats, Individual, Population, evolve
from .grid import (
    DimensionMismatchError,
    ImageFormatError,
    hamming,
    load_image,
    save_image,
)
from .persist import PopulationFormatError, load_population, save_population

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DIMENSIONS = 3

STATS_HEADER = "generation,best_fitness,avg_fitness,elapsed_seconds"

_XOVER_FLAGS = {"1pt": "one_point", "2pt": "two_point"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def write_stats_csv(path, stats: list[GenerationStats], include_timing: bool) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(STATS_HEADER + "\n")
        for s in stats:
            elapsed = s.elapsed if include_timing else 0.0
            fh.write(
                f"{s.generation},{s.best_fitness},{s.average_fitness:.6f},{elapsed:.6f}\n"
            )


def cmd_evolve(args) -> int:
    start = load_image(args.start)
    goal = load_image(args.goal)
    config = EvolutionConfig(
        population_size=args.pop,
        generations=args.gens,
        passes=args.passes,
        crossover=_XOVER_FLAGS[args.xover],
        mutation=args.mutation,
        seed=args.seed,
    )
    best, stats, population = evolve(config, start, goal, threads=args.threads)
    for s in stats:
        print(f"generation {s.generation}: best_fitness={s.best_fitness}")
    if args.out:
        save_population(
            population, config, args.out, width=start.width, height=start.height
        )
    if args.stats:
        write_stats_csv(args.stats, stats, include_timing=args.timing)
    if args.result:
        save_image(run(start, best.genome, config.passes), args.result, args.result_format)
    return EXIT_OK


def _pick_rule(loaded, index: str, image, goal_path, passes: int):
    members = loaded.population.members
    if index != "best":
        try:
            i = int(index)
        except ValueError:
            raise ValueError(f"--index must be an integer or 'best', got {index!r}") from None
        if not 0 <= i < len(members):
            raise ValueError(f"index {i} out of range for {len(members)} individuals")
        return members[i].genome
    if goal_path is not None:
        goal = load_image(goal_path)
        scored = [evaluate(m.genome, image, goal, passes) for m in members]
        best = min(range(len(members)), key=lambda i: (scored[i].distance, i))
        return members[best].genome
    if any(m.fitness is None for m in members):
        raise ValueError(
            "--index best needs cached fitness for every individual, or --goal to score against"
        )
    best = min(range(len(members)), key=lambda i: (members[i].fitness.distance, i))
    return members[best].genome


def cmd_apply(args) -> int:
    loaded = load_population(args.pop)
    image = load_image(args.image)
    rule = _pick_rule(loaded, args.index, image, args.goal, args.passes)
    save_image(run(image, rule, args.passes), args.out, args.format)
    return EXIT_OK


def cmd_score(args) -> int:
    a = load_image(args.image_a)
    b = load_image(args.image_b)
    distance = hamming(a, b)
    print(f"distance={distance} normalized={distance / (a.width * a.height):.6f}")
    return EXIT_OK


def cmd_init_pop(args) -> int:
    if args.size < 4:
        raise ValueError(f"--size must be >= 4, got {args.size}")
    rng = np.random.default_rng(args.seed)
    members = [Individual(random_rule(rng)) for _ in range(args.size)]
    save_population(Population(members, generation=0, seed=args.seed), None, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    thread_counts = [1]
    max_threads = os.cpu_count() or 1
    if max_threads > 1:
        thread_counts.append(max_threads)
    for threads in thread_counts:
        report = bench_generation(
            args.width,
            args.height,
            pop_size=args.pop,
            passes=args.passes,
            seed=args.seed,
            reps=args.reps,
            threads=threads,
        )
        print(format_report(report))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="caevolve",
        description="Evolve binary CA rule tables with a genetic algorithm "
        "so that repeated passes turn a start image into a goal edge image.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run the generation loop on an image pair")
    p.add_argument("--start", required=True, help="start image (P1/P2/P4/P5)")
    p.add_argument("--goal", required=True, help="goal edge image, same size as start")
    p.add_argument("--pop", type=int, default=10, help="population size (default 10)")
    p.add_argument("--gens", type=int, default=5, help="generations (default 5)")
    p.add_argument("--passes", type=int, default=1, help="CA passes per evaluation")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--xover", choices=sorted(_XOVER_FLAGS), default="2pt")
    p.add_argument("--mutation", choices=["type1", "type2"], default="type1")
    p.add_argument("--out", help="write the final population here (capop/1)")
    p.add_argument("--stats", help="write per-generation stats CSV here")
    p.add_argument("--result", help="write the best individual's result image here")
    p.add_argument("--result-format", choices=["P1", "P4"], default="P1")
    p.add_argument("--threads", type=int, default=1, help="evaluation threads")
    p.add_argument(
        "--timing",
        action="store_true",
        help="record wall-clock seconds in the stats CSV (off by default so "
        "identical seeds give byte-identical files)",
    )
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("apply", help="apply one stored rule table to an image")
    p.add_argument("--pop", required=True, help="population file (capop/1)")
    p.add_argument("--index", required=True, help="individual index, or 'best'")
    p.add_argument("--image", required=True, help="input image")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--goal", help="goal image for scoring when --index best")
    p.add_argument("--format", choices=["P1", "P4"], default="P1")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("score", help="Hamming distance between two images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("init-pop", help="write a fresh random population file")
    p.add_argument("--size", type=int, required=True, help="number of individuals (>= 4)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_init_pop)

    p = sub.add_parser("bench", help="time one full generation")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--pop", type=int, default=10)
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"caevolve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DimensionMismatchError as exc:
        print(f"caevolve: {exc}", file=sys.stderr)
        return EXIT_DIMENSIONS
    except (ImageFormatError, PopulationFormatError) as exc:
        print(f"caevolve: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"caevolve: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"caevolve: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
