"""Liar's dice with one private die per player.

Players alternate strictly increasing claims (quantity, face) about the two
dice on the table, ordered by quantity then face, or challenge the previous
claim.  On a challenge the dice are revealed: a false claim loses for the
claimer, a true one for the challenger.
"""

from __future__ import annotations

from .base import CHANCE, GameRules


class LiarsDice(GameRules):
    """State: (roll0, roll1, claims, caller); rolls are 0 before chance moves.

    Claim k encodes quantity k // sides + 1 and face k % sides + 1; the
    challenge action is ``num_claims``.
    """

    def __init__(self, sides: int = 6):
        self.sides = sides
        self.num_claims = 2 * sides
        self.name = "liars_dice" if sides == 6 else f"liars_dice({sides})"

    def initial(self):
        return (0, 0, (), -1)

    def is_terminal(self, s):
        return s[3] >= 0

    def actor(self, s):
        if s[0] == 0 or s[1] == 0:
            return CHANCE
        return len(s[2]) % 2

    def actions(self, s):
        if s[0] == 0 or s[1] == 0:
            return range(1, self.sides + 1)
        claims = s[2]
        if not claims:
            return range(self.num_claims)
        return list(range(claims[-1] + 1, self.num_claims)) + [self.num_claims]

    def apply(self, s, a):
        roll0, roll1, claims, caller = s
        if roll0 == 0:
            return (a, roll1, claims, caller)
        if roll1 == 0:
            return (roll0, a, claims, caller)
        if a == self.num_claims:
            return (roll0, roll1, claims, len(claims) % 2)
        return (roll0, roll1, claims + (a,), caller)

    def payoff(self, s):
        roll0, roll1, claims, caller = s
        q, v = claims[-1] // self.sides + 1, claims[-1] % self.sides + 1
        truthful = (roll0 == v) + (roll1 == v) >= q
        loser = caller if truthful else 1 - caller
        return -1.0 if loser == 0 else 1.0

    def infoset_key(self, s):
        p = len(s[2]) % 2
        return (p, s[p], s[2])
