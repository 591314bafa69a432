"""One-shot matrix games encoded as a two-move tree (second mover blind)."""

from __future__ import annotations

import numpy as np

from .base import CHANCE, GameRules


class MatrixGame(GameRules):
    """Simultaneous zero-sum matrix game; payoff[i, j] goes to player 0."""

    def __init__(self, name: str, payoffs, action_names=None):
        self.name = name
        self.payoffs = np.asarray(payoffs, dtype=np.float64)
        n, m = self.payoffs.shape
        self.action_names = action_names or (list(range(n)), list(range(m)))

    def initial(self):
        return (-1, -1)

    def actor(self, s):
        return 0 if s[0] < 0 else 1

    def actions(self, s):
        side = 0 if s[0] < 0 else 1
        return range(len(self.action_names[side]))

    def apply(self, s, a):
        return (a, s[1]) if s[0] < 0 else (s[0], a)

    def is_terminal(self, s):
        return s[0] >= 0 and s[1] >= 0

    def payoff(self, s):
        return float(self.payoffs[s[0], s[1]])

    def infoset_key(self, s):
        return "p1" if s[0] < 0 else "p2"


def rock_paper_scissors() -> MatrixGame:
    wins = np.array([
        [0.0, -1.0, 1.0],
        [1.0, 0.0, -1.0],
        [-1.0, 1.0, 0.0],
    ])
    return MatrixGame("rps", wins, (["R", "P", "S"], ["R", "P", "S"]))
