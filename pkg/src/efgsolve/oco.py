"""FTRL and OMD over the treeplex with dilated Euclidean regularizers.

Both solvers decompose into per-decision-point water-filling problems solved
bottom-up: at each decision point the local linear term is the sliced
cumulative loss (FTRL) or instantaneous loss (OMD) plus the optimal child
objective values g, and the simplex argmin has the closed form
``[alpha - v]^+ / beta`` with alpha the water level making the entries sum
to one.

Two regularizer kinds are supported.  ``euclidean`` is the plain dilated
squared norm.  ``future`` additionally charges each decision point with the
squared norm of the strategy currently being solved, which cancels the
quadratic term out of the propagated value F, making F exactly the water
level.  With per-point weights taken from a shadow regret-matching
accumulator, the ``future`` solvers reproduce the regret-matching iterates
themselves (see the coupled schedules below).
"""

from __future__ import annotations

import numpy as np

from .cfr import default_epsilon, normalize_positive
from .games.base import CompiledGame
from .local_rules import solve_alpha_l1_batch
from .treeplex import Treeplex

ASSUMPTION_TOL = 1e-9
RESIDUAL_NORM = 1e-11


class _Diagnostics:
    """Assumption monitor ||b^{t-1} x^t||^2 <= ||b^t x^{t+1}||^2 and the
    worst water-filling residual seen so far."""

    __slots__ = ("violations", "max_residual", "_prev")

    def __init__(self):
        self.violations = 0
        self.max_residual = 0.0
        self._prev = None

    def observe_weights(self, tp: Treeplex, beta: np.ndarray, b: np.ndarray) -> None:
        b = np.asarray(b, dtype=np.float64)
        cur = beta * beta * tp.segment_sums(b * b)
        if self._prev is not None:
            bad = self._prev > cur + ASSUMPTION_TOL * np.maximum(1.0, cur)
            self.violations += int(np.count_nonzero(bad))
        self._prev = cur

    def observe_residual(self, resid: float) -> None:
        if resid > self.max_residual:
            self.max_residual = resid


def waterfill_pass(tp: Treeplex, base: np.ndarray, beta: np.ndarray,
                   f_offset: np.ndarray | None = None, euclidean: bool = False):
    """Bottom-up simplex solves ``x_j = [alpha_j - (base_j + g_j)]^+ / beta_j``.

    ``base`` is the flat linear term before child propagation; ``g`` sums the
    children's optimal values F.  With the future-depended regularizer
    F = alpha - f_offset; with the plain euclidean one the local quadratic
    term is subtracted as well.  Returns (strategy, alphas, max residual).

    Arithmetic stays in the dtype of ``base``: the solvers accumulate in
    extended precision because masses of order epsilon must be resolved out
    of cumulative terms of order T * L.
    """
    dtype = base.dtype
    acc = np.array(base, copy=True)
    b = np.zeros(tp.num_sequences, dtype=dtype)
    alphas = np.zeros(tp.num_decision_points, dtype=dtype)
    max_resid = 0.0
    for level in tp.levels:
        target = beta[level.dps].astype(dtype)
        v2 = np.where(level.pad_mask, acc[level.pad_idx], dtype.type(np.inf))
        alpha = solve_alpha_l1_batch(v2, level.pad_mask, target)
        alphas[level.dps] = alpha
        x2 = np.maximum(alpha[:, None] - v2, dtype.type(0.0)) / target[:, None]
        x2 = np.where(level.pad_mask, x2, dtype.type(0.0))
        resid = np.abs(x2.sum(axis=1) - 1.0).max() if len(target) else 0.0
        if resid > max_resid:
            max_resid = float(resid)
        b[level.slots] = x2[level.pad_mask]
        f = alpha
        if euclidean:
            f = f - 0.5 * target * (x2 * x2).sum(axis=1)
        if f_offset is not None:
            f = f - f_offset[level.dps]
        up = level.pslot >= 0
        if np.any(up):
            np.add.at(acc, level.pslot[up], f[up])
    return b, alphas, max_resid


# -- weight schedules ---------------------------------------------------------


class ConstantBetaSchedule:
    """Depth-recursive constant weights for the non-adaptive baselines.

    beta_j = scale * L * sqrt(T) * depth_factor_j with the factor 2 at leaf
    decision points and 2 + max_a (sum of child factors) above them.
    """

    adaptive = False

    def __init__(self, game: CompiledGame, player: int, scale: float, horizon: int):
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        tp = game.treeplex(player)
        self.beta = (scale * max(game.loss_bound, 1.0) * np.sqrt(horizon)
                     * depth_factors(tp))

    def weights(self, solver, t, loss):
        return self.beta


def depth_factors(tp: Treeplex) -> np.ndarray:
    """Bottom-up factor 2 + max_a sum-of-children, 2 at the leaves."""
    acc = np.zeros(tp.num_sequences)
    out = np.zeros(tp.num_decision_points)
    for level in tp.levels:
        child = np.where(level.pad_mask, acc[level.pad_idx], -np.inf)
        f = 2.0 + np.maximum(child.max(axis=1), 0.0)
        out[level.dps] = f
        up = level.pslot >= 0
        if np.any(up):
            np.add.at(acc, level.pslot[up], f[up])
    return out


class RegretNormSchedule:
    """Adaptive weights from a shadow regret-matching accumulator.

    ``plus=False`` tracks the plain accumulator and yields the l1 norm of its
    positive part; ``plus=True`` tracks the thresholded accumulator and yields
    its l1 norm.  The shadow is updated from the same counterfactual pass a
    reference regret-matching solver would run on identical inputs.
    """

    adaptive = True

    def __init__(self, game: CompiledGame, player: int, plus: bool,
                 epsilon: float | None = None):
        self.tp = game.treeplex(player)
        self.plus = plus
        self.epsilon = default_epsilon(game.loss_bound) if epsilon is None else epsilon
        tp = self.tp
        self.shadow = (self.epsilon / np.sqrt(tp.n_actions))[tp.dp_of_slot].copy()

    def initial_weights(self) -> np.ndarray:
        return self.tp.segment_sums(np.maximum(self.shadow, 0.0))

    def weights(self, solver, t, loss):
        tp = self.tp
        lhat, values = tp.counterfactual(loss, solver.strategy)
        r = values[tp.dp_of_slot] - lhat
        if self.plus:
            self.shadow = np.maximum(self.shadow + r, 0.0)
        else:
            self.shadow = self.shadow + r
        return tp.segment_sums(np.maximum(self.shadow, 0.0))


# -- solvers ------------------------------------------------------------------


class FtrlSolver:
    """Adaptive follow-the-regularized-leader over the treeplex."""

    def __init__(self, game: CompiledGame, player: int, schedule,
                 kind: str = "future", f_offset: np.ndarray | None = None):
        if kind not in ("future", "euclidean"):
            raise ValueError(f"unknown regularizer kind {kind!r}")
        self.game = game
        self.player = player
        self.tp = game.treeplex(player)
        self.schedule = schedule
        self.kind = kind
        self.f_offset = None if f_offset is None else f_offset.astype(np.longdouble)
        self.cumulative = np.zeros(self.tp.num_sequences, dtype=np.longdouble)
        self.strategy = self.tp.uniform_behavioral()
        self.diag = _Diagnostics()
        self._beta = None
        self.last_alphas = None

    def step(self, t: int, loss: np.ndarray, opp_sum: np.ndarray | None = None) -> None:
        beta = np.asarray(self.schedule.weights(self, t, loss), dtype=np.float64)
        if np.any(beta <= 0.0):
            raise ValueError("nonpositive regularizer weight")
        self.cumulative += loss
        b, alphas, resid = waterfill_pass(
            self.tp, self.cumulative, beta,
            f_offset=self.f_offset, euclidean=(self.kind == "euclidean"),
        )
        self.strategy = b.astype(np.float64)
        self.last_alphas = alphas.astype(np.float64)
        self._beta = beta
        self.diag.observe_residual(resid)
        self.diag.observe_weights(self.tp, beta, self.strategy)

    def diagnostics(self):
        return self.diag.violations, self.diag.max_residual


class OmdSolver:
    """Adaptive online mirror descent over the treeplex."""

    def __init__(self, game: CompiledGame, player: int, schedule,
                 kind: str = "future", f_offset: np.ndarray | None = None):
        if kind not in ("future", "euclidean"):
            raise ValueError(f"unknown regularizer kind {kind!r}")
        self.game = game
        self.player = player
        self.tp = game.treeplex(player)
        self.schedule = schedule
        self.kind = kind
        self.f_offset = None if f_offset is None else f_offset.astype(np.longdouble)
        self._x = self.tp.uniform_behavioral().astype(np.longdouble)
        self.strategy = self.tp.uniform_behavioral()
        if hasattr(schedule, "initial_weights"):
            self.beta_prev = np.asarray(schedule.initial_weights(), dtype=np.float64)
        else:
            self.beta_prev = np.asarray(schedule.weights(self, 0, None), dtype=np.float64)
        self.diag = _Diagnostics()
        self.diag.observe_weights(self.tp, self.beta_prev, self.strategy)
        self.last_alphas = None

    def step(self, t: int, loss: np.ndarray, opp_sum: np.ndarray | None = None) -> None:
        tp = self.tp
        beta = np.asarray(self.schedule.weights(self, t, loss), dtype=np.float64)
        if np.any(beta <= 0.0):
            raise ValueError("nonpositive regularizer weight")
        base = loss.astype(np.longdouble) - self.beta_prev[tp.dp_of_slot] * self._x
        offset = self.f_offset
        euclid = self.kind == "euclidean"
        if euclid:
            # F = alpha - b^t/2 ||x^{t+1}||^2 + b^{t-1}/2 ||x^t||^2; the last
            # term is a per-point constant folded into the offset.
            prev_sq = (0.5 * self.beta_prev
                       * tp.segment_sums(self.strategy * self.strategy)).astype(np.longdouble)
            offset = -prev_sq if offset is None else offset - prev_sq
        b, alphas, resid = waterfill_pass(tp, base, beta, f_offset=offset,
                                          euclidean=euclid)
        self._x = b
        self.strategy = b.astype(np.float64)
        self.last_alphas = alphas.astype(np.float64)
        self.beta_prev = beta
        self.diag.observe_residual(resid)
        self.diag.observe_weights(tp, beta, self.strategy)

    def diagnostics(self):
        return self.diag.violations, self.diag.max_residual


def ftrl_cfr(game: CompiledGame, player: int, epsilon: float | None = None) -> FtrlSolver:
    """Future-depended FTRL whose weights recover regret matching exactly.

    The shadow accumulator is seeded like the reference solver, and the seed
    is subtracted from the propagated F so child contributions match the
    cumulative counterfactual losses of the reference run.
    """
    sched = RegretNormSchedule(game, player, plus=False, epsilon=epsilon)
    tp = game.treeplex(player)
    offset = sched.epsilon / np.sqrt(tp.n_actions)
    return FtrlSolver(game, player, sched, kind="future", f_offset=offset)


def omd_cfr(game: CompiledGame, player: int, epsilon: float | None = None) -> OmdSolver:
    """Future-depended OMD whose weights recover regret matching+ exactly."""
    sched = RegretNormSchedule(game, player, plus=True, epsilon=epsilon)
    return OmdSolver(game, player, sched, kind="future")
