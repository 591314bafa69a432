"""Regret-minimization solvers for two-player zero-sum imperfect-information
games over the sequence-form strategy space."""

from .treeplex import (
    Treeplex,
    TreeplexError,
    counterfactual_losses,
    instantaneous_regrets,
    make_treeplex,
    regret_decomposition_residual,
)
from .games import build_game, build_rules, available_games

__all__ = [
    "Treeplex", "TreeplexError", "counterfactual_losses",
    "instantaneous_regrets", "make_treeplex", "regret_decomposition_residual",
    "build_game", "build_rules", "available_games",
]

__version__ = "0.1.0"
