"""Sequence-form strategy space of a single player.

A treeplex indexes one player's decision points (information sets) and the
flat vector of sequences (decision point, action).  Every vector that the
solvers touch -- strategies, losses, cumulative losses, regrets -- is a flat
``numpy`` array of length ``num_sequences``.  Two array conventions are used
throughout:

* sequence form ``x``: slot (j, a) holds the probability of playing the whole
  action sequence from the root down to and including (j, a); the slots of a
  decision point sum to the parent sequence's value (flow conservation).
* behavioral form ``b``: slot (j, a) holds the local probability of action a
  at decision point j; the slots of each decision point sum to one.

Decision points are stored children-before-parents so every bottom-up
recursion is a single pass over the stored order; the passes themselves are
vectorized one height level at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

FLOW_TOL = 1e-12
FLOW_CHECK_TOL = 1e-9


class TreeplexError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionPoint:
    """Static metadata of one decision point (after reindexing)."""

    id: int
    n_actions: int
    first_slot: int
    parent_slot: int  # flat slot of the parent sequence, -1 at the root
    parent: int  # parent decision point id, -1 at the root
    is_dummy: bool


class _Level:
    """Precomputed index arrays for all decision points at one height."""

    __slots__ = ("dps", "slots", "seg", "pslot", "pad_idx", "pad_mask", "n_actions")

    def __init__(self, dps: np.ndarray, first_slot: np.ndarray, n_actions: np.ndarray,
                 parent_slot: np.ndarray):
        self.dps = dps
        self.n_actions = n_actions[dps]
        counts = self.n_actions
        self.slots = np.concatenate(
            [np.arange(first_slot[j], first_slot[j] + n_actions[j]) for j in dps]
        )
        self.seg = np.repeat(np.arange(len(dps)), counts)
        self.pslot = parent_slot[dps]
        m = int(counts.max())
        k = len(dps)
        pad = np.zeros((k, m), dtype=np.int64)
        mask = np.zeros((k, m), dtype=bool)
        for i, j in enumerate(dps):
            n = n_actions[j]
            pad[i, :n] = np.arange(first_slot[j], first_slot[j] + n)
            mask[i, :n] = True
        self.pad_idx = pad
        self.pad_mask = mask


class Treeplex:
    """Indexed sequential decision structure of one player.

    Built from per-decision-point action counts and parent sequences given in
    any order; the constructor reindexes decision points so that children
    always precede parents.  If more than one decision point is parentless, a
    one-action dummy root is inserted above them so the structure has a single
    root with reach one.
    """

    def __init__(self, n_actions: Sequence[int],
                 parents: Sequence[Optional[tuple[int, int]]]):
        n_actions = [int(n) for n in n_actions]
        if len(n_actions) != len(parents):
            raise TreeplexError("n_actions and parents length mismatch")
        if any(n < 1 for n in n_actions):
            raise TreeplexError("every decision point needs at least one action")

        roots = [i for i, p in enumerate(parents) if p is None]
        if not roots:
            raise TreeplexError("no parentless decision point")
        parents = list(parents)
        dummy_orig = -1
        if len(roots) > 1:
            dummy_orig = len(n_actions)
            n_actions.append(1)
            parents = parents + [None]
            for i in roots:
                parents[i] = (dummy_orig, 0)

        n = len(n_actions)
        for i, p in enumerate(parents):
            if p is None:
                continue
            pj, pa = p
            if not (0 <= pj < n) or pj == i:
                raise TreeplexError(f"bad parent for decision point {i}")
            if not (0 <= pa < n_actions[pj]):
                raise TreeplexError(f"bad parent action for decision point {i}")

        # Height = longest chain to a leaf decision point; parents are strictly
        # higher than every child, so sorting by height is children-first.
        children: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parents):
            if p is not None:
                children[p[0]].append(i)
        height = [-1] * n
        order: list[int] = []
        stack = [(r, False) for r in range(n) if parents[r] is None]
        while stack:
            node, done = stack.pop()
            if done:
                height[node] = 1 + max((height[c] for c in children[node]), default=-1)
                order.append(node)
            else:
                stack.append((node, True))
                stack.extend((c, False) for c in children[node])
        if len(order) != n:
            raise TreeplexError("parent graph is not a forest reaching all points")

        perm = sorted(range(n), key=lambda i: (height[i], i))
        new_id = {orig: k for k, orig in enumerate(perm)}

        self.num_decision_points = n
        self.n_actions = np.array([n_actions[orig] for orig in perm], dtype=np.int64)
        self.first_slot = np.zeros(n, dtype=np.int64)
        self.first_slot[1:] = np.cumsum(self.n_actions)[:-1]
        self.num_sequences = int(self.n_actions.sum())

        self.parent_dp = np.full(n, -1, dtype=np.int64)
        self.parent_slot = np.full(n, -1, dtype=np.int64)
        for k, orig in enumerate(perm):
            p = parents[orig]
            if p is not None:
                pj = new_id[p[0]]
                self.parent_dp[k] = pj
                self.parent_slot[k] = self.first_slot[pj] + p[1]

        self.root = n - 1
        self.dummy_root = new_id[dummy_orig] if dummy_orig >= 0 else -1
        self.num_infosets = n - (1 if dummy_orig >= 0 else 0)
        self.dp_of_orig = np.array(
            [new_id[i] for i in range(n - (dummy_orig >= 0))], dtype=np.int64
        )
        self.orig_first_slot = self.first_slot[self.dp_of_orig]

        self.dp_of_slot = np.repeat(np.arange(n), self.n_actions)
        heights = np.array([height[orig] for orig in perm])
        self.levels = [
            _Level(np.flatnonzero(heights == h), self.first_slot, self.n_actions,
                   self.parent_slot)
            for h in range(int(heights.max()) + 1)
        ]
        self.decision_points = [
            DecisionPoint(
                id=k,
                n_actions=int(self.n_actions[k]),
                first_slot=int(self.first_slot[k]),
                parent_slot=int(self.parent_slot[k]),
                parent=int(self.parent_dp[k]),
                is_dummy=(k == self.dummy_root),
            )
            for k in range(n)
        ]

    # -- indexing helpers -------------------------------------------------

    def slot(self, orig_infoset: int, action: int) -> int:
        """Flat slot of (infoset, action) in the pre-reindex numbering."""
        return int(self.orig_first_slot[orig_infoset] + action)

    def slots_of(self, dp: int) -> slice:
        start = int(self.first_slot[dp])
        return slice(start, start + int(self.n_actions[dp]))

    def segment_sums(self, values: np.ndarray) -> np.ndarray:
        """Per-decision-point sums of a flat slot vector."""
        return np.bincount(self.dp_of_slot, weights=values,
                           minlength=self.num_decision_points)

    # -- strategies --------------------------------------------------------

    def uniform_behavioral(self) -> np.ndarray:
        return np.repeat(1.0 / self.n_actions, self.n_actions)

    def random_behavioral(self, rng: np.random.Generator) -> np.ndarray:
        """Dirichlet(1,...,1) draw at every decision point."""
        e = rng.exponential(size=self.num_sequences)
        return e / self.segment_sums(e)[self.dp_of_slot]

    def behavioral_to_sequence(self, b: np.ndarray) -> np.ndarray:
        """Top-down product x[(j,a)] = x[parent seq of j] * b[(j,a)]."""
        self._check_len(b)
        x = np.empty_like(b, dtype=np.float64)
        for level in reversed(self.levels):
            reach = np.where(level.pslot >= 0, x[np.maximum(level.pslot, 0)], 1.0)
            x[level.slots] = b[level.slots] * reach[level.seg]
        return x

    def sequence_to_behavioral(self, x: np.ndarray, validate: bool = True) -> np.ndarray:
        """Local decisions b[(j,a)] = x[(j,a)] / x[parent]; uniform at zero reach."""
        self._check_len(x)
        if validate:
            if np.any(x < -FLOW_CHECK_TOL):
                raise TreeplexError("negative sequence-form entries")
            self.assert_flow(x, tol=FLOW_CHECK_TOL)
        reach = np.where(self.parent_slot >= 0, x[np.maximum(self.parent_slot, 0)], 1.0)
        denom = reach[self.dp_of_slot]
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(denom > 0.0, x / np.where(denom > 0.0, denom, 1.0), 0.0)
        dead = reach <= 0.0
        if np.any(dead):
            uni = np.repeat(dead / np.maximum(self.n_actions, 1), self.n_actions)
            b = np.where(uni > 0.0, uni, b)
        return b

    def flow_residuals(self, x: np.ndarray) -> np.ndarray:
        """Per-decision-point |sum of child slots - parent sequence value|."""
        sums = self.segment_sums(x)
        reach = np.where(self.parent_slot >= 0, x[np.maximum(self.parent_slot, 0)], 1.0)
        return np.abs(sums - reach)

    def assert_flow(self, x: np.ndarray, tol: float = FLOW_TOL) -> None:
        resid = self.flow_residuals(x)
        worst = float(resid.max()) if len(resid) else 0.0
        if worst > tol:
            raise TreeplexError(f"flow constraint violated by {worst:.3e}")

    def assert_behavioral(self, b: np.ndarray, tol: float = FLOW_TOL) -> None:
        self._check_len(b)
        if np.any(b < -tol):
            raise TreeplexError("negative behavioral entries")
        sums = self.segment_sums(b)
        worst = float(np.abs(sums - 1.0).max())
        if worst > tol:
            raise TreeplexError(f"behavioral simplex violated by {worst:.3e}")

    # -- bottom-up recursions ----------------------------------------------

    def counterfactual(self, loss: np.ndarray, b: np.ndarray):
        """Fold descendant values into per-decision-point loss vectors.

        Returns ``(lhat, values)`` where ``lhat`` is the flat vector with
        lhat[(j,a)] = loss[(j,a)] + sum of values over child decision points
        under (j, a), and ``values[j] = <lhat_j, b_j>``.  The root value equals
        ``<loss, behavioral_to_sequence(b)>``.
        """
        self._check_len(loss)
        self._check_len(b)
        lhat = np.array(loss, dtype=np.float64, copy=True)
        values = np.zeros(self.num_decision_points)
        for level in self.levels:
            sl = level.slots
            v = np.bincount(level.seg, weights=lhat[sl] * b[sl], minlength=len(level.dps))
            values[level.dps] = v
            up = level.pslot >= 0
            if np.any(up):
                np.add.at(lhat, level.pslot[up], v[up])
        return lhat, values

    def best_response_pass(self, loss: np.ndarray):
        """Minimize <loss, x> over the treeplex by bottom-up action minima.

        Returns ``(value, b)`` with ``b`` the pure argmin behavioral strategy,
        ties broken toward the lowest action index.
        """
        self._check_len(loss)
        acc = np.array(loss, dtype=np.float64, copy=True)
        b = np.zeros(self.num_sequences)
        values = np.zeros(self.num_decision_points)
        for level in self.levels:
            vals = np.where(level.pad_mask, acc[level.pad_idx], np.inf)
            best = np.argmin(vals, axis=1)
            v = vals[np.arange(len(level.dps)), best]
            values[level.dps] = v
            b[level.pad_idx[np.arange(len(level.dps)), best]] = 1.0
            up = level.pslot >= 0
            if np.any(up):
                np.add.at(acc, level.pslot[up], v[up])
        return float(values[self.root]), b

    def _check_len(self, v: np.ndarray) -> None:
        if v.shape != (self.num_sequences,):
            raise TreeplexError(
                f"expected vector of length {self.num_sequences}, got {v.shape}"
            )


def instantaneous_regrets(tp: Treeplex, lhat: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Flat regret vector r[(j,a)] = values[j] - lhat[(j,a)].

    ``<r_j, b_j> = 0`` at every decision point by construction.
    """
    return values[tp.dp_of_slot] - lhat


def counterfactual_losses(tp: Treeplex, loss: np.ndarray, b: np.ndarray):
    """Functional alias of :meth:`Treeplex.counterfactual`."""
    return tp.counterfactual(loss, b)


def regret_decomposition_residual(tp: Treeplex, loss: np.ndarray,
                                  b: np.ndarray, b_alt: np.ndarray) -> float:
    """|<l,x> - <l,x'> - sum_j x'_{p_j} <r_j, b'_j>| for strategies b, b'.

    The sum telescopes exactly, so the residual is pure float noise; used as a
    test primitive.
    """
    x = tp.behavioral_to_sequence(b)
    x_alt = tp.behavioral_to_sequence(b_alt)
    lhat, values = tp.counterfactual(loss, b)
    r = instantaneous_regrets(tp, lhat, values)
    reach_alt = np.where(tp.parent_slot >= 0, x_alt[np.maximum(tp.parent_slot, 0)], 1.0)
    local = tp.segment_sums(r * b_alt)
    rhs = float(np.dot(reach_alt, local))
    lhs = float(np.dot(loss, x)) - float(np.dot(loss, x_alt))
    return abs(lhs - rhs)


def make_treeplex(spec: Sequence[tuple[int, Optional[tuple[int, int]]]]) -> Treeplex:
    """Build a treeplex from ``[(n_actions, parent), ...]`` rows (test helper)."""
    return Treeplex([n for n, _ in spec], [p for _, p in spec])
