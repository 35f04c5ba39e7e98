"""Evolve binary cellular-automaton rule tables with a genetic algorithm.

The CA reads each cell's 3x3 Moore neighborhood as a 9-bit code and looks up
the next state in a 512-entry rule table; the GA treats each table as an
individual and searches for one whose repeated passes turn a start image
into a goal edge image, scored by Hamming distance.
"""

from .bench import BenchReport, bench_generation
from .ca import RuleTable, encode_window, random_rule, run, step
from .fitness import Evaluator, FitnessValue, evaluate
from .ga import (
    EvolutionConfig,
    EvolutionResult,
    GenerationStats,
    Individual,
    Population,
    crossover_one_point,
    crossover_two_point,
    evolve,
    make_offspring,
    mutate_type1,
    mutate_type2,
    select_parents,
    select_survivors,
)
from .grid import (
    BinaryGrid,
    DimensionMismatchError,
    ImageFormatError,
    binarize,
    hamming,
    load_image,
    save_image,
)
from .persist import (
    LoadedPopulation,
    PopulationFormatError,
    load_population,
    save_population,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "BinaryGrid",
    "DimensionMismatchError",
    "Evaluator",
    "EvolutionConfig",
    "EvolutionResult",
    "FitnessValue",
    "GenerationStats",
    "ImageFormatError",
    "Individual",
    "LoadedPopulation",
    "Population",
    "PopulationFormatError",
    "RuleTable",
    "bench_generation",
    "binarize",
    "crossover_one_point",
    "crossover_two_point",
    "encode_window",
    "evaluate",
    "evolve",
    "hamming",
    "load_image",
    "load_population",
    "make_offspring",
    "mutate_type1",
    "mutate_type2",
    "random_rule",
    "run",
    "save_image",
    "save_population",
    "select_parents",
    "select_survivors",
    "step",
]
