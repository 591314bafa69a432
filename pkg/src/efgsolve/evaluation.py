"""Exact best response, exploitability, and brute-force test oracles."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .games.base import CompiledGame
from .treeplex import Treeplex


@dataclass(frozen=True)
class EvalReport:
    """Best-response summary of a strategy profile.

    ``br_loss`` entries are each player's minimal expected loss against the
    given opponent strategy; ``value`` is the expected payoff to player 0 of
    the profile itself (payoff convention, chips won positive).
    """

    exploitability: float
    br_loss: tuple[float, float]
    value: float


def best_response(game: CompiledGame, player: int, opp_seq: np.ndarray):
    """Minimal expected loss and a pure minimizer against ``opp_seq``.

    Ties break toward the lowest action index.
    """
    loss = game.loss_vector(player, opp_seq)
    return game.treeplex(player).best_response_pass(loss)


def exploitability(game: CompiledGame, x_seq: np.ndarray, y_seq: np.ndarray) -> float:
    """Sum of both players' best-response gains against the profile.

    Zero exactly at a Nash equilibrium and nonnegative (up to float noise)
    everywhere else.
    """
    v0, _ = best_response(game, 0, y_seq)
    v1, _ = best_response(game, 1, x_seq)
    return -v1 - v0


def evaluate(game: CompiledGame, x_seq: np.ndarray, y_seq: np.ndarray) -> EvalReport:
    v0, _ = best_response(game, 0, y_seq)
    v1, _ = best_response(game, 1, x_seq)
    return EvalReport(
        exploitability=-v1 - v0,
        br_loss=(v0, v1),
        value=-game.bilinear_loss(x_seq, y_seq),
    )


def brute_force_best_response(game: CompiledGame, player: int,
                              opp_seq: np.ndarray) -> float:
    """Minimum loss over an exhaustive enumeration of pure strategies.

    Test oracle only; refuses instances with more than a few thousand pure
    strategies.
    """
    tp = game.treeplex(player)
    return brute_force_min_loss(tp, game.loss_vector(player, opp_seq))


def brute_force_min_loss(tp: Treeplex, loss: np.ndarray,
                         max_strategies: int = 200_000) -> float:
    total = 1
    for n in tp.n_actions:
        total *= int(n)
        if total > max_strategies:
            raise ValueError("instance too large for brute force")
    best = np.inf
    for choice in product(*(range(int(n)) for n in tp.n_actions)):
        b = np.zeros(tp.num_sequences)
        b[tp.first_slot + np.asarray(choice)] = 1.0
        v = float(np.dot(loss, tp.behavioral_to_sequence(b)))
        if v < best:
            best = v
    return best
