"""Approximate Nash equilibria of two-strategy anonymous games."""

from .dist import (
    CountPmf,
    TranslatedPoissonParams,
    binomial_pmf,
    poisson_binomial,
    poisson_binomial_without,
    rollin_bound,
    tp_distance_bound,
    translated_poisson_pmf,
    tv_distance,
)
from .equilibrium import (
    EquilibriumCertificate,
    brute_force_nash,
    expected_utility,
    is_eps_nash,
    regrets,
)
from .game import AnonymousGame, generate, load_game, normalize, save_game
from .ptas import SolverConfig, SolverExhausted, search_sparse, search_uniform, solve
from .rounding import RoundingParams, round_profile, stage1

__version__ = "0.1.0"
