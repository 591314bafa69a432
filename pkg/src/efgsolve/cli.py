"""Command line driver.

Examples:
    efgsolve --game leduc --algo cfr_plus --iters 1000 --out trace.csv
    efgsolve --game leduc --algo cfr --compare ftrl_cfr --iters 500
    efgsolve --game leduc --algo recfr --iters 1000 --sweep 0.1,0.01,0.001

A JSON config file can set any flag (keys named after the long flags,
``lambda`` included); explicit flags override the file.
"""

from __future__ import annotations

import argparse
import json
import sys

from .games import available_games
from .harness import ALGORITHMS, RunConfig, lockstep_compare, run, sweep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="efgsolve",
        description="Solve two-player zero-sum imperfect-information games "
                    "by regret minimization over the sequence form.",
    )
    p.add_argument("--config", help="JSON file with defaults for any flag")
    p.add_argument("--game", help=f"game spec, e.g. {', '.join(available_games())}")
    p.add_argument("--algo", choices=ALGORITHMS, help="algorithm to run")
    p.add_argument("--iters", type=int, help="number of iterations")
    p.add_argument("--avg", choices=["uniform", "linear"], dest="avg",
                   help="averaging scheme (default per algorithm)")
    p.add_argument("--weighting", choices=["constant", "linear", "cumulative"],
                   help="lambda schedule for recfr/picfr (default constant)")
    p.add_argument("--lambda", type=float, dest="lam",
                   help="lambda multiplier (recfr/picfr) or weight scale (ftrl/omd)")
    p.add_argument("--epsilon-init", type=float, dest="epsilon_init",
                   help="regret accumulator seed (default 1e-6 * loss bound)")
    p.add_argument("--eval-every", type=int, dest="eval_every",
                   help="evaluation stride (default ceil(iters/200))")
    p.add_argument("--order", choices=["alt", "sim"],
                   help="update order (default alt)")
    p.add_argument("--seed", type=int, help="recorded in the config; the solvers "
                   "are deterministic")
    p.add_argument("--out", help="CSV output path (default: print to stdout)")
    p.add_argument("--compare", choices=ALGORITHMS,
                   help="lockstep mode: run this algorithm on identical losses "
                        "and report the maximum strategy divergence")
    p.add_argument("--sweep", help="comma separated lambda grid")
    return p


_DEFAULTS = {"avg": None, "weighting": "constant", "lam": 0.1,
             "epsilon_init": None, "eval_every": None, "order": "alt",
             "seed": 0, "out": None, "compare": None, "sweep": None}


def parse_config(argv=None):
    args = build_parser().parse_args(argv)
    merged = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_vals = json.load(fh)
        renames = {"lambda": "lam", "epsilon-init": "epsilon_init",
                   "eval-every": "eval_every"}
        for k, v in file_vals.items():
            merged[renames.get(k, k)] = v
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            merged[k] = v
    for required in ("game", "algo", "iters"):
        if merged.get(required) is None:
            raise SystemExit(f"missing required option --{required}")
    order = {"alt": "alternating", "sim": "simultaneous"}.get(
        merged["order"], merged["order"])
    config = RunConfig(
        game=merged["game"], algo=merged["algo"], iters=int(merged["iters"]),
        averaging=merged["avg"], weighting=merged["weighting"],
        lam=float(merged["lam"]),
        epsilon_init=merged["epsilon_init"],
        eval_every=merged["eval_every"], update_order=order,
        seed=int(merged["seed"]), out=merged["out"],
    )
    return config, merged


def _echo_records(result, stream=sys.stdout):
    header = "iteration,exploitability,wall_ms,assumption1_violations,max_residual"
    if result.max_divergence is not None:
        header += ",max_divergence"
    print(header, file=stream)
    for rec in result.records:
        print(",".join(str(v) for v in rec.row()), file=stream)


def main(argv=None) -> int:
    config, merged = parse_config(argv)
    if merged["sweep"]:
        grid = [float(s) for s in str(merged["sweep"]).split(",") if s.strip()]
        out = sweep(config, grid)
        for lam, res in out["results"].items():
            print(f"lambda={lam:g} final_exploitability="
                  f"{res.final_exploitability:.6g}")
        print(f"best lambda={out['best_lambda']:g} "
              f"exploitability={out['best_exploitability']:.6g}")
        return 0
    if merged["compare"]:
        result = lockstep_compare(config, merged["compare"])
        if not config.out:
            _echo_records(result)
        print(f"max_divergence={result.max_divergence:.3e}", file=sys.stderr)
        return 0
    result = run(config)
    if not config.out:
        _echo_records(result)
    else:
        print(f"wrote {config.out}: final exploitability "
              f"{result.final_exploitability:.6g}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
