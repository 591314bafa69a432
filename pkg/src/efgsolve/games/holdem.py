"""Limit hold'em style betting games: Kuhn, Leduc, and flop hold'em (FHP).

All three share one engine: an ante, one private deal per player, a fixed
number of betting rounds with a raise cap and raise size per round, and an
optional public board dealt between rounds.  Betting follows the usual limit
dynamic: *call* matches the opponent (a check when bets are level), *raise*
adds the round's raise size on top of the opponent's bet, *fold* concedes and
is only available when facing a higher bet.  A round ends when a player calls
as anything but the round's first action.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations

from .base import CHANCE, GameRules

_PH_DEAL0, _PH_DEAL1, _PH_BOARD, _PH_PLAY, _PH_DONE = range(5)


def _high_card(ranks_hole, ranks_board):
    return (0, tuple(sorted(ranks_hole, reverse=True)))


def _leduc_value(ranks_hole, ranks_board):
    r = ranks_hole[0]
    if ranks_board and r == ranks_board[0]:
        return (1, r)
    return (0, r)


def _five_card_value(ranks_hole, ranks_board, suits_hole, suits_board):
    """Standard 5-card poker ranking on exactly five cards."""
    ranks = sorted(ranks_hole + ranks_board, reverse=True)
    flush = len(set(suits_hole + suits_board)) == 1
    distinct = sorted(set(ranks), reverse=True)
    straight = len(distinct) == 5 and distinct[0] - distinct[4] == 4
    counts = Counter(ranks)
    # (multiplicity, rank) pairs, dominant groups first.
    groups = sorted(((c, r) for r, c in counts.items()), reverse=True)
    shape = tuple(c for c, _ in groups)
    kick = tuple(r for _, r in groups)
    if straight and flush:
        return (8, kick)
    if shape[0] == 4:
        return (7, kick)
    if shape[:2] == (3, 2):
        return (6, kick)
    if flush:
        return (5, kick)
    if straight:
        return (4, kick)
    if shape[0] == 3:
        return (3, kick)
    if shape[:2] == (2, 2):
        return (2, kick)
    if shape[0] == 2:
        return (1, kick)
    return (0, kick)


class HoldemRules(GameRules):
    """Parametrized limit poker over a reduced deck.

    State fields: (phase, hole0, hole1, board, rnd, c0, c1, raises, acted,
    to_act, hist, folder) where c0/c1 are total chips contributed (antes
    included) and hist is the public betting line with '/' round separators.
    """

    def __init__(self, name, num_ranks, num_suits, hole_cards, board_per_round,
                 raise_caps, raise_sizes, ante, first_to_act, evaluator):
        self.name = name
        self.num_ranks = num_ranks
        self.num_suits = num_suits
        self.hole_cards = hole_cards
        self.board_per_round = board_per_round
        self.num_rounds = len(board_per_round)
        self.raise_caps = raise_caps
        self.raise_sizes = raise_sizes
        self.ante = ante
        self.first_to_act = first_to_act
        self.evaluator = evaluator
        self.deck = tuple(range(num_ranks * num_suits))

    def rank_of(self, card: int) -> int:
        return card // self.num_suits

    def suit_of(self, card: int) -> int:
        return card % self.num_suits

    def initial(self):
        return (_PH_DEAL0, (), (), (), 0, self.ante, self.ante, 0, 0,
                self.first_to_act[0], (), -1)

    def actor(self, s):
        return s[9] if s[0] == _PH_PLAY else CHANCE

    def is_terminal(self, s):
        return s[0] == _PH_DONE

    def actions(self, s):
        phase = s[0]
        if phase == _PH_DEAL0:
            return list(combinations(self.deck, self.hole_cards))
        if phase == _PH_DEAL1:
            rest = [c for c in self.deck if c not in s[1]]
            return list(combinations(rest, self.hole_cards))
        if phase == _PH_BOARD:
            used = set(s[1]) | set(s[2]) | set(s[3])
            rest = [c for c in self.deck if c not in used]
            return list(combinations(rest, self.board_per_round[s[4]]))
        phase_, hole0, hole1, board, rnd, c0, c1, raises, acted, to_act, hist, folder = s
        own, opp = (c0, c1) if to_act == 0 else (c1, c0)
        acts = []
        if opp > own:
            acts.append("f")
        acts.append("c")
        if raises < self.raise_caps[rnd]:
            acts.append("r")
        return acts

    def apply(self, s, a):
        phase, hole0, hole1, board, rnd, c0, c1, raises, acted, to_act, hist, folder = s
        if phase == _PH_DEAL0:
            return (_PH_DEAL1, a, hole1, board, rnd, c0, c1, raises, acted,
                    to_act, hist, folder)
        if phase == _PH_DEAL1:
            return (_PH_PLAY, hole0, a, board, rnd, c0, c1, raises, acted,
                    to_act, hist, folder)
        if phase == _PH_BOARD:
            return (_PH_PLAY, hole0, hole1, board + a, rnd, c0, c1, raises,
                    acted, to_act, hist, folder)
        if a == "f":
            return (_PH_DONE, hole0, hole1, board, rnd, c0, c1, raises, acted,
                    to_act, hist + ("f",), to_act)
        if a == "c":
            if to_act == 0:
                c0 = c1
            else:
                c1 = c0
            hist = hist + ("c",)
            if acted >= 1:  # a call that answers a prior action closes the round
                if rnd + 1 == self.num_rounds:
                    return (_PH_DONE, hole0, hole1, board, rnd, c0, c1, raises,
                            acted, to_act, hist, -1)
                nxt = rnd + 1
                phase = _PH_BOARD if self.board_per_round[nxt] > 0 else _PH_PLAY
                return (phase, hole0, hole1, board, nxt, c0, c1, 0, 0,
                        self.first_to_act[nxt], hist + ("/",), -1)
            return (_PH_PLAY, hole0, hole1, board, rnd, c0, c1, raises,
                    acted + 1, 1 - to_act, hist, folder)
        # raise
        size = self.raise_sizes[rnd]
        if to_act == 0:
            c0 = c1 + size
        else:
            c1 = c0 + size
        return (_PH_PLAY, hole0, hole1, board, rnd, c0, c1, raises + 1,
                acted + 1, 1 - to_act, hist + ("r",), folder)

    def payoff(self, s):
        _, hole0, hole1, board, _, c0, c1, _, _, _, _, folder = s
        if folder == 0:
            return -float(c0)
        if folder == 1:
            return float(c1)
        v0 = self._value(hole0, board)
        v1 = self._value(hole1, board)
        if v0 > v1:
            return float(c1)
        if v1 > v0:
            return -float(c0)
        return 0.0

    def _value(self, hole, board):
        rh = tuple(self.rank_of(c) for c in hole)
        rb = tuple(self.rank_of(c) for c in board)
        if self.evaluator == "five_card":
            sh = tuple(self.suit_of(c) for c in hole)
            sb = tuple(self.suit_of(c) for c in board)
            return _five_card_value(rh, rb, sh, sb)
        if self.evaluator == "pair_or_high":
            return _leduc_value(rh, rb)
        return _high_card(rh, rb)

    def infoset_key(self, s):
        _, hole0, hole1, board, _, _, _, _, _, to_act, hist, _ = s
        return (to_act, hole0 if to_act == 0 else hole1, board, hist)


def kuhn() -> HoldemRules:
    """Three-card poker: one betting round, one raise, ante and bet of 1."""
    return HoldemRules("kuhn", num_ranks=3, num_suits=1, hole_cards=1,
                       board_per_round=(0,), raise_caps=(1,), raise_sizes=(1,),
                       ante=1, first_to_act=(0,), evaluator="high_card")


def leduc(num_ranks: int = 3, num_suits: int = 2) -> HoldemRules:
    """Two betting rounds over a 2-suit deck; one public card; a pair with the
    board beats any high card.  Raise sizes 2 then 4, two raises per round."""
    name = "leduc" if (num_ranks, num_suits) == (3, 2) else f"leduc({num_ranks},{num_suits})"
    return HoldemRules(name, num_ranks=num_ranks, num_suits=num_suits,
                       hole_cards=1, board_per_round=(0, 1), raise_caps=(2, 2),
                       raise_sizes=(2, 4), ante=1, first_to_act=(0, 0),
                       evaluator="pair_or_high")


def fhp(num_suits: int = 2, num_ranks: int = 5) -> HoldemRules:
    """Flop hold'em: two hole cards, three-card flop, three raises of 100 per
    round, ante 50; player 2 acts first after the flop."""
    name = "fhp" if (num_suits, num_ranks) == (2, 5) else f"fhp({num_suits},{num_ranks})"
    return HoldemRules(name, num_ranks=num_ranks, num_suits=num_suits,
                       hole_cards=2, board_per_round=(0, 3), raise_caps=(3, 3),
                       raise_sizes=(100, 100), ante=50, first_to_act=(0, 1),
                       evaluator="five_card")
