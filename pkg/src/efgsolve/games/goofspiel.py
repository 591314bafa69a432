"""Goofspiel (game of pure strategy) with a shuffled prize deck.

Each round a prize card is revealed by chance, then both players commit one
card from their hands simultaneously (sequentialized with player 1 blind to
player 0's pending card).  The higher card takes the prize; ties split it.
The player with the higher final score receives +1.  The forced final round
(one card left in each hand) is resolved without materializing nodes.

In the imperfect-information variant the committed cards stay hidden; players
only observe who won each prize.
"""

from __future__ import annotations

from .base import CHANCE, GameRules


def _remove(t, x):
    i = t.index(x)
    return t[:i] + t[i + 1:]


class Goofspiel(GameRules):
    """State: (hand0, hand1, prizes, cur_prize, pending0, diff,
    prize_seq, seq0, seq1, outcomes)."""

    def __init__(self, num_ranks: int, imperfect: bool = False):
        self.n = num_ranks
        self.imperfect = imperfect
        suffix = "_imp" if imperfect else ""
        self.name = f"goofspiel{num_ranks}{suffix}"

    def initial(self):
        cards = tuple(range(1, self.n + 1))
        return (cards, cards, cards, 0, 0, 0, (), (), (), ())

    def is_terminal(self, s):
        hand0, _, _, cur, _, _, _, _, _, _ = s
        return len(hand0) == 0 or (len(hand0) == 1 and cur == 0)

    def payoff(self, s):
        hand0, hand1, prizes, cur, pending0, diff, *_ = s
        if len(hand0) == 1:  # forced last round, resolved off-tree
            w = (hand0[0] > hand1[0]) - (hand0[0] < hand1[0])
            diff = diff + w * prizes[0]
        return float((diff > 0) - (diff < 0))

    def actor(self, s):
        _, _, _, cur, pending0, *_ = s
        if cur == 0:
            return CHANCE
        return 0 if pending0 == 0 else 1

    def actions(self, s):
        hand0, hand1, prizes, cur, pending0, *_ = s
        if cur == 0:
            return prizes
        return hand0 if pending0 == 0 else hand1

    def apply(self, s, a):
        hand0, hand1, prizes, cur, pending0, diff, pseq, seq0, seq1, outs = s
        if cur == 0:
            return (hand0, hand1, _remove(prizes, a), a, 0, diff,
                    pseq + (a,), seq0, seq1, outs)
        if pending0 == 0:
            return (hand0, hand1, prizes, cur, a, diff, pseq, seq0, seq1, outs)
        w = (pending0 > a) - (pending0 < a)
        return (_remove(hand0, pending0), _remove(hand1, a), prizes, 0, 0,
                diff + w * cur, pseq, seq0 + (pending0,), seq1 + (a,),
                outs + (w,))

    def infoset_key(self, s):
        _, _, _, cur, pending0, _, pseq, seq0, seq1, outs = s
        player = 0 if pending0 == 0 else 1
        if self.imperfect:
            return (player, pseq, seq0 if player == 0 else seq1, outs)
        return (player, pseq, seq0, seq1)
