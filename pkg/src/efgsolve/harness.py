"""Experiment driver: iteration loops, averaging, evaluation, CSV traces.

The alternating protocol is the standard one: within iteration t player 0
updates against the opponent's current strategy and player 1 then responds to
player 0's freshly updated one.  Averages accumulate the newly produced
strategies; exploitability is always evaluated on the extracted averages.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .cfr import AverageAccumulator, CfrSolver
from .evaluation import exploitability
from .games import build_game
from .games.base import CompiledGame
from .oco import ConstantBetaSchedule, FtrlSolver, OmdSolver, ftrl_cfr, omd_cfr
from .recfr import (
    PicfrSolver,
    RecfrSolver,
    coupled_picfr,
    coupled_recfr,
    make_weighting,
)

CSV_HEADER = ["iteration", "exploitability", "wall_ms",
              "assumption1_violations", "max_residual"]

ALGORITHMS = ("cfr", "cfr_rm_plus", "cfr_plus", "lcfr", "pcfr", "pcfr_plus",
              "ftrl", "omd", "ftrl_cfr", "omd_cfr", "recfr", "picfr",
              "precfr", "ppicfr")

_DEFAULT_AVERAGING = {
    "cfr": "uniform", "cfr_rm_plus": "uniform", "cfr_plus": "linear",
    "lcfr": "linear", "pcfr": "uniform", "pcfr_plus": "linear",
    "ftrl": "uniform", "omd": "uniform", "ftrl_cfr": "uniform",
    "omd_cfr": "linear", "recfr": "linear", "picfr": "linear",
    "precfr": "linear", "ppicfr": "linear",
}

_RECURSIVE = ("recfr", "picfr", "precfr", "ppicfr")


class RunAbort(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run bit-for-bit (timing aside)."""

    game: str
    algo: str
    iters: int
    averaging: Optional[str] = None  # None picks the algorithm's default
    weighting: str = "constant"
    lam: float = 0.1
    epsilon_init: Optional[float] = None
    eval_every: Optional[int] = None  # None -> ceil(iters / 200)
    update_order: str = "alternating"
    seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.update_order not in ("alternating", "simultaneous"):
            raise ValueError(f"unknown update order {self.update_order!r}")
        if self.averaging not in (None, "uniform", "linear"):
            raise ValueError(f"unknown averaging {self.averaging!r}")
        if self.eval_every is not None and self.eval_every < 1:
            raise ValueError("eval_every must be at least 1")

    @property
    def averaging_scheme(self) -> str:
        return self.averaging or _DEFAULT_AVERAGING[self.algo]

    @property
    def eval_stride(self) -> int:
        return self.eval_every or max(1, math.ceil(self.iters / 200))


@dataclass
class IterationRecord:
    iteration: int
    exploitability: float
    wall_ms: int
    assumption1_violations: int
    max_residual: float
    max_divergence: Optional[float] = None

    def row(self) -> list:
        out = [self.iteration, f"{self.exploitability:.17g}", self.wall_ms,
               self.assumption1_violations, f"{self.max_residual:.17g}"]
        if self.max_divergence is not None:
            out.append(f"{self.max_divergence:.17g}")
        return out


def make_solver(config: RunConfig, game: CompiledGame, player: int,
                reference=None):
    """Build one player's solver for the configured algorithm."""
    algo = config.algo
    eps = config.epsilon_init
    if algo == "cfr":
        return CfrSolver(game, player, epsilon=eps)
    if algo in ("cfr_rm_plus", "cfr_plus"):
        return CfrSolver(game, player, plus=True, epsilon=eps)
    if algo == "lcfr":
        return CfrSolver(game, player, linear_discount=True, epsilon=eps)
    if algo == "pcfr":
        return CfrSolver(game, player, predictive=True, epsilon=eps)
    if algo == "pcfr_plus":
        return CfrSolver(game, player, plus=True, predictive=True, epsilon=eps)
    if algo == "ftrl":
        sched = ConstantBetaSchedule(game, player, config.lam, config.iters)
        return FtrlSolver(game, player, sched, kind="euclidean")
    if algo == "omd":
        sched = ConstantBetaSchedule(game, player, config.lam, config.iters)
        return OmdSolver(game, player, sched, kind="euclidean")
    if algo == "ftrl_cfr":
        return ftrl_cfr(game, player, epsilon=eps)
    if algo == "omd_cfr":
        return omd_cfr(game, player, epsilon=eps)
    if algo in _RECURSIVE:
        if config.weighting == "oracle":
            if reference is None:
                raise ValueError("oracle weighting needs a reference solver")
            if algo in ("recfr", "precfr"):
                return coupled_recfr(game, player, reference)
            return coupled_picfr(game, player, reference)
        w = make_weighting(config.weighting, game, player, config.lam, config.iters)
        if algo in ("recfr", "precfr"):
            return RecfrSolver(game, player, w, predictive=(algo == "precfr"))
        return PicfrSolver(game, player, w, predictive=(algo == "ppicfr"))
    raise ValueError(f"unknown algorithm {algo!r}")


def _check_finite(strategy: np.ndarray, t: int, player: int) -> None:
    if not np.isfinite(strategy).all():
        raise RunAbort(f"non-finite strategy at iteration {t}, player {player}")


def _observe_opponent(solver, opp_seq: np.ndarray) -> None:
    w = getattr(solver, "weighting", None)
    if w is not None and hasattr(w, "observe"):
        w.observe(opp_seq)


class _Clock:
    def __init__(self):
        self.start = time.perf_counter()

    def ms(self) -> int:
        return int((time.perf_counter() - self.start) * 1000)


def run(config: RunConfig,
        on_record: Optional[Callable[[IterationRecord], None]] = None,
        game: Optional[CompiledGame] = None):
    """Execute one configured run and return its :class:`RunResult`.

    Records are also written incrementally to ``config.out`` when set.
    """
    if game is None:
        game = build_game(config.game)
    solvers = [make_solver(config, game, p) for p in (0, 1)]
    return _drive(config, game, solvers, candidates=None, on_record=on_record)


def _drive(config: RunConfig, game: CompiledGame, solvers, candidates,
           on_record=None):
    """Main loop shared by plain runs and lockstep comparisons.

    In lockstep mode the reference ``solvers`` drive the play and the
    ``candidates`` receive exactly the same losses; the per-iteration maximum
    strategy gap is recorded.
    """
    tp = (game.treeplex(0), game.treeplex(1))
    scheme = config.averaging_scheme
    report = [AverageAccumulator(tp[p].num_sequences, scheme) for p in (0, 1)]
    # Strategies whose losses each player has been charged with, including the
    # initial iterate; the recursive solvers rebuild cumulative losses from it.
    charged = [AverageAccumulator(tp[1].num_sequences, scheme),
               AverageAccumulator(tp[0].num_sequences, scheme)]
    if candidates is not None:
        charged = [AverageAccumulator(tp[1].num_sequences, "uniform"),
                   AverageAccumulator(tp[0].num_sequences, "uniform")]

    clock = _Clock()
    stride = config.eval_stride
    records: list[IterationRecord] = []
    writer = ctx = None
    if config.out:
        ctx = open(config.out, "w", newline="")
        writer = csv.writer(ctx)
        header = CSV_HEADER + (["max_divergence"] if candidates else [])
        writer.writerow(header)

    max_div = 0.0
    try:
        for t in range(1, config.iters + 1):
            if config.update_order == "alternating":
                y_seq = tp[1].behavioral_to_sequence(solvers[1].strategy)
                charged[0].add(y_seq, t)
                loss0 = game.loss_vector(0, y_seq)
                _observe_opponent(solvers[0], y_seq)
                solvers[0].step(t, loss0, opp_sum=charged[0].scaled_total(t))
                _check_finite(solvers[0].strategy, t, 0)
                if candidates is not None:
                    _observe_opponent(candidates[0], y_seq)
                    candidates[0].step(t, loss0, opp_sum=charged[0].scaled_total(t))
                    max_div = max(max_div, float(np.abs(
                        solvers[0].strategy - candidates[0].strategy).max()))
                x_seq = tp[0].behavioral_to_sequence(solvers[0].strategy)
                report[0].add(x_seq, t)
                charged[1].add(x_seq, t)
                loss1 = game.loss_vector(1, x_seq)
                _observe_opponent(solvers[1], x_seq)
                solvers[1].step(t, loss1, opp_sum=charged[1].scaled_total(t))
                _check_finite(solvers[1].strategy, t, 1)
                if candidates is not None:
                    _observe_opponent(candidates[1], x_seq)
                    candidates[1].step(t, loss1, opp_sum=charged[1].scaled_total(t))
                    max_div = max(max_div, float(np.abs(
                        solvers[1].strategy - candidates[1].strategy).max()))
                report[1].add(tp[1].behavioral_to_sequence(solvers[1].strategy), t)
            else:
                x_seq = tp[0].behavioral_to_sequence(solvers[0].strategy)
                y_seq = tp[1].behavioral_to_sequence(solvers[1].strategy)
                charged[0].add(y_seq, t)
                charged[1].add(x_seq, t)
                loss0 = game.loss_vector(0, y_seq)
                loss1 = game.loss_vector(1, x_seq)
                _observe_opponent(solvers[0], y_seq)
                _observe_opponent(solvers[1], x_seq)
                solvers[0].step(t, loss0, opp_sum=charged[0].scaled_total(t))
                solvers[1].step(t, loss1, opp_sum=charged[1].scaled_total(t))
                _check_finite(solvers[0].strategy, t, 0)
                _check_finite(solvers[1].strategy, t, 1)
                if candidates is not None:
                    candidates[0].step(t, loss0, opp_sum=charged[0].scaled_total(t))
                    candidates[1].step(t, loss1, opp_sum=charged[1].scaled_total(t))
                    max_div = max(max_div, float(np.abs(
                        solvers[0].strategy - candidates[0].strategy).max()),
                        float(np.abs(
                            solvers[1].strategy - candidates[1].strategy).max()))
                report[0].add(tp[0].behavioral_to_sequence(solvers[0].strategy), t)
                report[1].add(tp[1].behavioral_to_sequence(solvers[1].strategy), t)

            if t % stride == 0 or t == config.iters:
                eps = exploitability(game, report[0].mean(), report[1].mean())
                v0, r0 = solvers[0].diagnostics()
                v1, r1 = solvers[1].diagnostics()
                rec = IterationRecord(
                    iteration=t,
                    exploitability=eps,
                    wall_ms=clock.ms(),
                    assumption1_violations=v0 + v1,
                    max_residual=max(r0, r1),
                    max_divergence=(max_div if candidates is not None else None),
                )
                records.append(rec)
                if writer is not None:
                    writer.writerow(rec.row())
                    ctx.flush()
                if on_record is not None:
                    on_record(rec)
    finally:
        if ctx is not None:
            ctx.close()

    return RunResult(config=config, records=records,
                     mean_x=report[0].mean(), mean_y=report[1].mean(),
                     game=game, solvers=tuple(solvers),
                     max_divergence=(max_div if candidates is not None else None))


@dataclass
class RunResult:
    config: RunConfig
    records: list
    mean_x: np.ndarray
    mean_y: np.ndarray
    game: CompiledGame
    solvers: tuple
    max_divergence: Optional[float] = None

    @property
    def final_exploitability(self) -> float:
        return self.records[-1].exploitability


def lockstep_compare(config: RunConfig, algo_b: str,
                     game: Optional[CompiledGame] = None) -> RunResult:
    """Run ``config.algo`` and ``algo_b`` side by side on identical losses.

    The first algorithm's trajectory drives the play.  With
    ``weighting='oracle'`` the second algorithm's weights are read from the
    first's accumulators, which requires a regret-matching reference.
    """
    if game is None:
        game = build_game(config.game)
    refs = [make_solver(config, game, p) for p in (0, 1)]
    cand_config = replace(config, algo=algo_b)
    cands = [make_solver(cand_config, game, p, reference=refs[p]) for p in (0, 1)]
    return _drive(config, game, refs, candidates=cands)


def sweep(config: RunConfig, grid, game: Optional[CompiledGame] = None) -> dict:
    """Run the lambda grid and report each final exploitability and the argmin.

    Fresh solver state per cell; ``config.out`` taken as a filename prefix.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty sweep grid")
    if config.algo not in _RECURSIVE + ("ftrl", "omd"):
        raise ValueError(f"algorithm {config.algo!r} has no lambda to sweep")
    if game is None:
        game = build_game(config.game)
    results = {}
    for lam in grid:
        out = f"{config.out}.lam{lam:g}.csv" if config.out else None
        cell = replace(config, lam=lam, out=out)
        results[lam] = run(cell, game=game)
    best = min(results, key=lambda k: results[k].final_exploitability)
    return {"results": results, "best_lambda": best,
            "best_exploitability": results[best].final_exploitability}
