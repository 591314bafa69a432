"""Game rules interface and the compiler that turns rules into solver inputs.

A game is described by a small immutable-state rule machine.  Compilation
walks the full history tree once and produces everything the solvers need:

* one :class:`~efgsolve.treeplex.Treeplex` per player,
* a sparse loss matrix ``A`` with ``x^T A y`` the expected loss of player 0
  (payoffs enter negated: chips won by player 0 count as negative loss),
* per-decision-point context used by the weighting schedules (loss bound,
  counterfactual reach of chance plus a uniform opponent),
* size statistics.

Only the compiled artifacts are kept; the history tree itself is never
materialized.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..treeplex import Treeplex

CHANCE = -1

CHANCE_PROB_TOL = 1e-12


class GameError(ValueError):
    pass


class GameRules(abc.ABC):
    """Immutable-state description of a two-player zero-sum game."""

    name: str = "game"

    @abc.abstractmethod
    def initial(self) -> Hashable: ...

    @abc.abstractmethod
    def actor(self, s) -> int:
        """0 or 1 for a player node, CHANCE for a chance node."""

    @abc.abstractmethod
    def actions(self, s) -> Sequence: ...

    def chance_probs(self, s) -> Sequence[float]:
        acts = self.actions(s)
        return [1.0 / len(acts)] * len(acts)

    @abc.abstractmethod
    def apply(self, s, a) -> Hashable: ...

    @abc.abstractmethod
    def is_terminal(self, s) -> bool: ...

    @abc.abstractmethod
    def payoff(self, s) -> float:
        """Terminal payoff to player 0 (player 1 receives the negation)."""

    @abc.abstractmethod
    def infoset_key(self, s) -> Hashable:
        """Identifier of the acting player's information set at ``s``."""


@dataclass(frozen=True)
class GameStats:
    """Size measurements of the compiled game.

    ``num_histories`` counts histories where a player acts and ``depth`` is
    the maximum number of player actions along any play path; chance nodes
    contribute to neither.
    """

    num_decision_points: int
    num_histories: int
    num_leaves: int
    depth: int
    max_decision_size: int


@dataclass(frozen=True)
class LossContext:
    """Per-decision-point inputs of the weighting schedules for one player."""

    loss_bound: float
    uniform_reach: np.ndarray  # chance * uniform-opponent reach, internal dp order
    n_actions: np.ndarray


class _InfosetTable:
    """Registry of one player's information sets discovered during the walk."""

    __slots__ = ("index", "n_actions", "parent", "counts", "reach")

    def __init__(self):
        self.index: dict = {}
        self.n_actions: list[int] = []
        self.parent: list[Optional[tuple[int, int]]] = []
        self.counts: list[int] = []
        self.reach: list[float] = []

    def register(self, key, n_actions: int, parent, ext_reach: float) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.n_actions)
            self.index[key] = i
            self.n_actions.append(n_actions)
            self.parent.append(parent)
            self.counts.append(1)
            self.reach.append(ext_reach)
            return i
        if self.n_actions[i] != n_actions:
            raise GameError(f"infoset {key!r} visited with differing action counts")
        if self.parent[i] != parent:
            raise GameError(f"perfect recall violated at infoset {key!r}")
        self.counts[i] += 1
        self.reach[i] += ext_reach
        return i


class CompiledGame:
    """Treeplexes, loss matrix, and measurements of one built game."""

    def __init__(self, rules: GameRules, stats_only: bool = False):
        self.rules = rules
        self.name = rules.name
        self._compile(rules, stats_only)

    # -- public surface ----------------------------------------------------

    def treeplex(self, player: int) -> Treeplex:
        tp = self._treeplex[player]
        if tp is None:
            raise GameError("game was compiled stats_only")
        return tp

    def loss_vector(self, player: int, opp_seq: np.ndarray) -> np.ndarray:
        """Sequence-form loss of ``player`` against the opponent flow.

        Linear in the opponent vector; player 0 minimizes ``x^T A y`` and
        player 1 minimizes ``-x^T A y``.
        """
        if player == 0:
            return self._A.dot(opp_seq)
        return -self._AT.dot(opp_seq)

    def bilinear_loss(self, x: np.ndarray, y: np.ndarray) -> float:
        """Expected loss of player 0, ``x^T A y``."""
        return float(np.dot(x, self._A.dot(y)))

    def loss_context(self, player: int) -> LossContext:
        tp = self.treeplex(player)
        return LossContext(self.loss_bound, self._uniform_reach[player], tp.n_actions)

    def uniform_reach(self, player: int) -> np.ndarray:
        return self._uniform_reach[player]

    def reach_matrix(self, player: int) -> sp.csr_matrix:
        """Rows map an extended opponent flow [y; 1] to per-decision-point
        counterfactual reach (chance times opponent), internal dp order."""
        m = self._reach_mat[player]
        if m is None:
            raise GameError("game was compiled stats_only")
        return m

    # -- compilation ---------------------------------------------------------

    def _compile(self, rules: GameRules, stats_only: bool) -> None:
        tables = (_InfosetTable(), _InfosetTable())
        term_info = ([], [])
        term_act = ([], [])
        term_w: list[float] = []
        reach_rows: tuple[list, list] = ([], [])
        reach_cols: tuple[list, list] = ([], [])
        reach_vals: tuple[list, list] = ([], [])

        stat = {"nodes": 0, "leaves": 0, "depth": 0, "L": 0.0}

        actor_of = rules.actor
        actions_of = rules.actions
        apply_to = rules.apply
        terminal = rules.is_terminal
        key_of = rules.infoset_key

        def walk(s, last0, last1, creach, ext0, ext1, plies):
            if terminal(s):
                stat["leaves"] += 1
                if plies > stat["depth"]:
                    stat["depth"] = plies
                u = float(rules.payoff(s))
                if abs(u) > stat["L"]:
                    stat["L"] = abs(u)
                if not stats_only:
                    for p, last in ((0, last0), (1, last1)):
                        term_info[p].append(-1 if last is None else last[0])
                        term_act[p].append(0 if last is None else last[1])
                    term_w.append(-u * creach)
                return
            actor = actor_of(s)
            acts = actions_of(s)
            if actor == CHANCE:
                probs = rules.chance_probs(s)
                total = sum(probs)
                if abs(total - 1.0) > CHANCE_PROB_TOL:
                    raise GameError(f"chance probabilities sum to {total!r}")
                for a, q in zip(acts, probs):
                    walk(apply_to(s, a), last0, last1, creach * q,
                         ext0 * q, ext1 * q, plies)
                return
            stat["nodes"] += 1
            n = len(acts)
            table = tables[actor]
            if actor == 0:
                j = table.register(key_of(s), n, last0, ext0)
                if not stats_only:
                    reach_rows[0].append(j)
                    reach_cols[0].append(last1)
                    reach_vals[0].append(creach)
                u = 1.0 / n
                for ai in range(n):
                    walk(apply_to(s, acts[ai]), (j, ai), last1, creach,
                         ext0, ext1 * u, plies + 1)
            else:
                j = table.register(key_of(s), n, last1, ext1)
                if not stats_only:
                    reach_rows[1].append(j)
                    reach_cols[1].append(last0)
                    reach_vals[1].append(creach)
                u = 1.0 / n
                for ai in range(n):
                    walk(apply_to(s, acts[ai]), last0, (j, ai), creach,
                         ext0 * u, ext1, plies + 1)

        walk(rules.initial(), None, None, 1.0, 1.0, 1.0, 0)

        sizes = [c for t in tables for c in t.counts]
        self.stats = GameStats(
            num_decision_points=len(tables[0].n_actions) + len(tables[1].n_actions),
            num_histories=stat["nodes"],
            num_leaves=stat["leaves"],
            depth=stat["depth"],
            max_decision_size=max(sizes) if sizes else 0,
        )
        self.loss_bound = stat["L"]

        if stats_only:
            self._treeplex = (None, None)
            self._A = self._AT = None
            self._uniform_reach = (None, None)
            self._reach_mat = (None, None)
            return

        tps = []
        reaches = []
        for p in (0, 1):
            t = tables[p]
            tp = Treeplex(t.n_actions, t.parent)
            tps.append(tp)
            r = np.ones(tp.num_decision_points)
            r[tp.dp_of_orig] = np.asarray(t.reach)
            reaches.append(r)
        self._treeplex = tuple(tps)
        self._uniform_reach = tuple(reaches)

        seq = []
        for p in (0, 1):
            tp = tps[p]
            info = np.asarray(term_info[p], dtype=np.int64)
            act = np.asarray(term_act[p], dtype=np.int64)
            if np.any(info < 0):
                if tp.dummy_root < 0:
                    raise GameError(
                        f"player {p} never acts on some play path; "
                        "cannot attribute terminal losses"
                    )
                dummy_slot = int(tp.first_slot[tp.dummy_root])
                slots = np.where(info >= 0, tp.orig_first_slot[np.maximum(info, 0)] + act,
                                 dummy_slot)
            else:
                slots = tp.orig_first_slot[info] + act
            seq.append(slots)
        w = np.asarray(term_w)
        n0, n1 = tps[0].num_sequences, tps[1].num_sequences
        A = sp.coo_matrix((w, (seq[0], seq[1])), shape=(n0, n1)).tocsr()
        self._A = A
        self._AT = A.T.tocsr()

        mats = []
        for p in (0, 1):
            tp, opp = tps[p], tps[1 - p]
            rows = tp.dp_of_orig[np.asarray(reach_rows[p], dtype=np.int64)]
            cols_raw = reach_cols[p]
            cols = np.array(
                [opp.num_sequences if c is None else opp.slot(c[0], c[1])
                 for c in cols_raw],
                dtype=np.int64,
            )
            m = sp.coo_matrix(
                (np.asarray(reach_vals[p]), (rows, cols)),
                shape=(tp.num_decision_points, opp.num_sequences + 1),
            ).tocsr()
            mats.append(m)
        self._reach_mat = tuple(mats)
