"""Placement solvers: two GA encodings, a random baseline and an exhaustive oracle."""

from .baseline import random_baseline
from .exact import DEFAULT_CAP, SearchSpaceTooLarge, exhaustive_solve, search_space_size
from .ga import GaConfig, SolveResult, run_ga
from .gaba import GabaEncoding, gaba_decode, gaba_fitness
from .operators import swap_mutation, tournament_select, two_point_crossover
from .problem import KernelTable, Problem
from .raba import RabaEncoding, raba_decode_and_backup, raba_fitness

ALGORITHMS = ("gap-gaba", "gap-raba", "random", "exact")

__all__ = [
    "ALGORITHMS", "DEFAULT_CAP", "GaConfig", "GabaEncoding", "KernelTable", "Problem", "RabaEncoding",
    "SearchSpaceTooLarge", "SolveResult", "exhaustive_solve", "gaba_decode", "gaba_fitness",
    "raba_decode_and_backup", "raba_fitness", "random_baseline", "run_ga", "search_space_size",
    "swap_mutation", "tournament_select", "two_point_crossover",
]
