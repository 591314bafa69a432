"""Full-game regret-matching iterations over a treeplex.

One solver instance owns one player's strategy.  Each step folds the received
sequence-form loss into per-decision-point counterfactual losses, updates the
local accumulators, and emits the next behavioral strategy.  Variants cover
plain regret matching, the thresholded (+) rule, linear discounting, and the
one-step-predictive rules.
"""

from __future__ import annotations

import numpy as np

from .games.base import CompiledGame
from .treeplex import Treeplex

DEFAULT_EPSILON_SCALE = 1e-6


def default_epsilon(loss_bound: float) -> float:
    """Accumulator seed keeping every positive-part norm bounded away from 0."""
    return DEFAULT_EPSILON_SCALE * max(loss_bound, 1.0)


def normalize_positive(tp: Treeplex, v: np.ndarray):
    """Per-decision-point normalization of the positive part of ``v``.

    Decision points whose positive part vanishes fall back to the uniform
    decision; the count of such events is returned alongside.
    """
    pos = np.maximum(v, 0.0)
    sums = tp.segment_sums(pos)
    dead = sums <= 0.0
    b = pos / np.where(dead, 1.0, sums)[tp.dp_of_slot]
    fallbacks = int(np.count_nonzero(dead))
    if fallbacks:
        uniform = (1.0 / tp.n_actions)[tp.dp_of_slot]
        b = np.where(dead[tp.dp_of_slot], uniform, b)
    return b, fallbacks


class AverageAccumulator:
    """Weighted running average of sequence-form strategies.

    ``uniform`` weighs every iterate equally; ``linear`` weighs iterate t by t.
    """

    def __init__(self, num_sequences: int, scheme: str = "uniform"):
        if scheme not in ("uniform", "linear"):
            raise ValueError(f"unknown averaging scheme {scheme!r}")
        self.scheme = scheme
        self.sum = np.zeros(num_sequences)
        self.weight = 0.0

    def add(self, x_seq: np.ndarray, t: int) -> None:
        w = float(t) if self.scheme == "linear" else 1.0
        self.sum += w * x_seq
        self.weight += w

    def mean(self) -> np.ndarray:
        if self.weight <= 0.0:
            raise ValueError("no strategies accumulated")
        return self.sum / self.weight

    def scaled_total(self, t: int) -> np.ndarray:
        """t times the current average; under uniform weighting this is the
        plain running sum, bit for bit."""
        if self.weight <= 0.0:
            raise ValueError("no strategies accumulated")
        return self.sum * (t / self.weight)


class CfrSolver:
    """Counterfactual regret minimization for one player.

    ``plus`` switches the local rule to regret matching+ (thresholded
    accumulator).  ``linear_discount`` rescales the accumulator by
    (t-1)/t before each update, so after T steps it equals
    ``sum_t (t/T) r_t``.  ``predictive`` emits the next strategy from the
    accumulator plus the most recent instantaneous regret.
    """

    def __init__(self, game: CompiledGame, player: int, plus: bool = False,
                 linear_discount: bool = False, predictive: bool = False,
                 epsilon: float | None = None):
        self.game = game
        self.player = player
        self.tp = game.treeplex(player)
        self.plus = plus
        self.linear_discount = linear_discount
        self.predictive = predictive
        self.epsilon = default_epsilon(game.loss_bound) if epsilon is None else epsilon
        tp = self.tp
        self.state = (self.epsilon / np.sqrt(tp.n_actions))[tp.dp_of_slot].copy()
        self.strategy, _ = normalize_positive(tp, self.state)
        self.fallback_events = 0
        self.last_regret = np.zeros(tp.num_sequences)

    def step(self, t: int, loss: np.ndarray, opp_sum: np.ndarray | None = None) -> None:
        tp = self.tp
        lhat, values = tp.counterfactual(loss, self.strategy)
        r = values[tp.dp_of_slot] - lhat
        if self.linear_discount and t > 1:
            self.state *= (t - 1.0) / t
        if self.plus:
            self.state = np.maximum(self.state + r, 0.0)
        else:
            self.state = self.state + r
        emit = self.state
        if self.predictive and t > 1:
            emit = self.state + r
        self.strategy, dead = normalize_positive(tp, emit)
        self.fallback_events += dead
        self.last_regret = r

    def diagnostics(self):
        return 0, 0.0

    def positive_norms(self, ord: int = 1) -> np.ndarray:
        """Per-decision-point norm of the positive part of the accumulator."""
        pos = np.maximum(self.state, 0.0)
        if ord == 1:
            return self.tp.segment_sums(pos)
        return np.sqrt(self.tp.segment_sums(pos * pos))
