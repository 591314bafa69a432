"""Regret-free solvers that rebuild their local state every iteration.

Instead of accumulating per-decision-point regrets, these solvers pin the
squared norm of the next weighted decision to a user-chosen lambda and solve
for the matching substitute values bottom-up.  The recursive variant works
from the opponent's average strategy (the cumulative loss is linear in it);
the policy-iterative variant needs only the current loss and strategy.
"""

from __future__ import annotations

import numpy as np

from .cfr import default_epsilon
from .games.base import CompiledGame
from .local_rules import solve_alpha_l2_batch
from .treeplex import Treeplex

LAMBDA_GRID = (0.1, 0.01, 1e-3, 1e-4, 1e-5)


# -- weighting schedules -------------------------------------------------------


class LinearWeighting:
    """lambda_j(t) = lam * reach_j * n_j * L^2 * t, nondecreasing in t."""

    def __init__(self, game: CompiledGame, player: int, lam: float):
        if lam <= 0.0:
            raise ValueError("lambda must be positive")
        ctx = game.loss_context(player)
        self.base = lam * ctx.uniform_reach * ctx.n_actions * ctx.loss_bound ** 2

    def lambdas(self, t: int) -> np.ndarray:
        return self.base * t


class ConstantWeighting:
    """lambda_j(t) = lam * reach_j * n_j * L^2 * T for a known horizon T."""

    def __init__(self, game: CompiledGame, player: int, lam: float, horizon: int):
        if lam <= 0.0:
            raise ValueError("lambda must be positive")
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        ctx = game.loss_context(player)
        self.value = lam * ctx.uniform_reach * ctx.n_actions * ctx.loss_bound ** 2 * horizon

    def lambdas(self, t: int) -> np.ndarray:
        return self.value


class CumulativeReachWeighting:
    """Experimental: lambda_j(t) = lam * n_j * L^2 * sum_tau reach_j(tau)^2
    with the realized opponent reach per iteration."""

    def __init__(self, game: CompiledGame, player: int, lam: float):
        if lam <= 0.0:
            raise ValueError("lambda must be positive")
        ctx = game.loss_context(player)
        self.scale = lam * ctx.n_actions * ctx.loss_bound ** 2
        self.reach_mat = game.reach_matrix(player)
        self.acc = np.zeros(len(ctx.n_actions))

    def observe(self, opp_seq: np.ndarray) -> None:
        ext = np.concatenate([opp_seq, [1.0]])
        r = self.reach_mat.dot(ext)
        self.acc += r * r

    def lambdas(self, t: int) -> np.ndarray:
        return np.maximum(self.scale * self.acc, 1e-300)


class CoupledWeighting:
    """Oracle weights read from a reference regret-matching solver.

    ``lambda_j = ||[accumulator_j]^+||_2^2`` reproduces the reference solver's
    iterates exactly (plain accumulator for the recursive solver against
    regret matching, thresholded for the policy-iterative one against regret
    matching+).
    """

    def __init__(self, reference):
        self.reference = reference

    def lambdas(self, t: int) -> np.ndarray:
        sq = self.reference.positive_norms(ord=2)
        return sq * sq


def make_weighting(name: str, game: CompiledGame, player: int, lam: float,
                   horizon: int):
    if name == "linear":
        return LinearWeighting(game, player, lam)
    if name == "constant":
        return ConstantWeighting(game, player, lam, horizon)
    if name == "cumulative":
        return CumulativeReachWeighting(game, player, lam)
    raise ValueError(f"unknown weighting {name!r}")


# -- solvers ------------------------------------------------------------------


def substitute_pass(tp: Treeplex, base: np.ndarray, lam: np.ndarray,
                    f_offset: np.ndarray | None = None):
    """Bottom-up solve of ``||[alpha_j - v_j]^+||_2^2 = lambda_j`` per point.

    ``v_j`` is the sliced ``base`` plus the children's propagated values
    (alpha minus offset).  Returns the emitted behavioral strategy (the
    normalized positive part), the alphas, and the worst constraint residual
    relative to max(1, lambda).
    """
    dtype = base.dtype
    acc = np.array(base, copy=True)
    b = np.zeros(tp.num_sequences, dtype=dtype)
    max_resid = 0.0
    for level in tp.levels:
        target = lam[level.dps].astype(dtype)
        v2 = np.where(level.pad_mask, acc[level.pad_idx], dtype.type(np.inf))
        alpha = solve_alpha_l2_batch(v2, level.pad_mask, target)
        q2 = np.maximum(alpha[:, None] - v2, dtype.type(0.0))
        q2 = np.where(level.pad_mask, q2, dtype.type(0.0))
        resid = (np.abs((q2 * q2).sum(axis=1) - target)
                 / np.maximum(1.0, target.astype(np.float64)))
        if len(resid):
            m = float(resid.max())
            if m > max_resid:
                max_resid = m
        norms = q2.sum(axis=1)
        x2 = q2 / np.where(norms > 0.0, norms, 1.0)[:, None]
        b[level.slots] = x2[level.pad_mask]
        f = alpha
        if f_offset is not None:
            f = f - f_offset[level.dps]
        up = level.pslot >= 0
        if np.any(up):
            np.add.at(acc, level.pslot[up], f[up])
    return b, max_resid


class RecfrSolver:
    """Recursive solver driven by the opponent's weighted average strategy.

    Holds no regret state: each step recomputes the cumulative loss from the
    opponent average and solves the substitute values bottom-up.  ``predictive``
    adds the current loss once more as a one-step prediction of the next.
    """

    def __init__(self, game: CompiledGame, player: int, weighting,
                 predictive: bool = False, f_offset: np.ndarray | None = None):
        self.game = game
        self.player = player
        self.tp = game.treeplex(player)
        self.weighting = weighting
        self.predictive = predictive
        self.f_offset = None if f_offset is None else f_offset.astype(np.longdouble)
        self.strategy = self.tp.uniform_behavioral()
        self.max_residual = 0.0

    def step(self, t: int, loss: np.ndarray, opp_sum: np.ndarray | None = None) -> None:
        if opp_sum is None:
            raise ValueError("recursive solver needs the opponent strategy sum")
        cumulative = self.game.loss_vector(self.player, opp_sum)
        if self.predictive:
            cumulative = cumulative + loss
        lam = self.weighting.lambdas(t)
        b, resid = substitute_pass(self.tp, cumulative.astype(np.longdouble),
                                   lam, f_offset=self.f_offset)
        self.strategy = b.astype(np.float64)
        if resid > self.max_residual:
            self.max_residual = resid

    def diagnostics(self):
        return 0, self.max_residual


class PicfrSolver:
    """Policy-iterative solver: depends only on the current loss and strategy.

    The previous iterate enters through its normalizer
    ``beta_prev = sqrt(lambda_prev / ||x_j||_2^2)``; the next decision is the
    normalized positive part of the substitute values.  ``predictive`` uses
    the one-step loss extrapolation ``2 l_t - l_{t-1}`` after the first step.
    """

    def __init__(self, game: CompiledGame, player: int, weighting,
                 predictive: bool = False, lam_init: np.ndarray | None = None):
        self.game = game
        self.player = player
        self.tp = game.treeplex(player)
        self.weighting = weighting
        self.predictive = predictive
        self._x = self.tp.uniform_behavioral().astype(np.longdouble)
        self.strategy = self.tp.uniform_behavioral()
        if lam_init is None:
            lam_init = np.zeros(self.tp.num_decision_points)
        self.lam_prev = np.asarray(lam_init, dtype=np.float64)
        self._loss_prev = None
        self.max_residual = 0.0

    def step(self, t: int, loss: np.ndarray, opp_sum: np.ndarray | None = None) -> None:
        tp = self.tp
        eff = loss
        if self.predictive:
            if self._loss_prev is not None:
                eff = 2.0 * loss - self._loss_prev
            self._loss_prev = loss
        lam = self.weighting.lambdas(t)
        norm_sq = tp.segment_sums(np.asarray(self._x, dtype=np.float64) ** 2)
        beta_prev = np.sqrt(self.lam_prev / norm_sq)
        base = eff.astype(np.longdouble) - beta_prev[tp.dp_of_slot] * self._x
        b, resid = substitute_pass(tp, base, lam)
        self._x = b
        self.strategy = b.astype(np.float64)
        self.lam_prev = np.asarray(lam, dtype=np.float64).copy()
        if resid > self.max_residual:
            self.max_residual = resid

    def diagnostics(self):
        return 0, self.max_residual


def coupled_recfr(game: CompiledGame, player: int, reference) -> RecfrSolver:
    """Recursive solver weight-coupled to a reference regret-matching run.

    The reference's accumulator seed is subtracted from the propagated values
    so the substitute quantities match its epsilon-seeded bookkeeping.
    """
    tp = game.treeplex(player)
    offset = reference.epsilon / np.sqrt(tp.n_actions)
    return RecfrSolver(game, player, CoupledWeighting(reference), f_offset=offset)


def coupled_picfr(game: CompiledGame, player: int, reference) -> PicfrSolver:
    """Policy-iterative solver weight-coupled to a reference RM+ run."""
    tp = game.treeplex(player)
    lam0 = np.full(tp.num_decision_points, reference.epsilon ** 2)
    return PicfrSolver(game, player, CoupledWeighting(reference), lam_init=lam0)
