"""Built-in benchmark games and the spec-string constructor."""

from __future__ import annotations

import re

from .base import CHANCE, CompiledGame, GameError, GameRules, GameStats, LossContext
from .battleship import Battleship
from .goofspiel import Goofspiel
from .holdem import HoldemRules, fhp, kuhn, leduc
from .liars_dice import LiarsDice
from .matrix import MatrixGame, rock_paper_scissors

__all__ = [
    "CHANCE", "CompiledGame", "GameError", "GameRules", "GameStats",
    "LossContext", "Battleship", "Goofspiel", "HoldemRules", "LiarsDice",
    "MatrixGame", "available_games", "build_game", "build_rules",
    "fhp", "kuhn", "leduc", "rock_paper_scissors",
]

_SPEC_RE = re.compile(r"^([a-z0-9_]+?)(?:\(([^)]*)\))?$")


def _int_args(argstr: str | None) -> list:
    if not argstr:
        return []
    out = []
    for part in argstr.split(","):
        part = part.strip()
        out.append(int(part) if part.isdigit() else part)
    return out


def build_rules(spec: str) -> GameRules:
    """Construct game rules from a spec string.

    Accepted names: ``rps``, ``kuhn``, ``leduc``, ``leduc(ranks,suits)``,
    ``fhp``, ``fhp(suits,ranks)``, ``goofspiel4``, ``goofspiel4_imp``,
    ``goofspiel5``, ``goofspiel(n[,imp])``, ``liars_dice``,
    ``liars_dice(sides)``, ``battleship``.
    """
    spec = spec.strip().lower()
    m = _SPEC_RE.match(spec)
    if not m:
        raise GameError(f"cannot parse game spec {spec!r}")
    name, args = m.group(1), _int_args(m.group(2))
    if name == "rps":
        return rock_paper_scissors()
    if name == "kuhn":
        return kuhn()
    if name == "leduc":
        return leduc(*args) if args else leduc()
    if name == "fhp":
        return fhp(*args) if args else fhp()
    if name == "liars_dice":
        return LiarsDice(*args) if args else LiarsDice()
    if name == "battleship":
        return Battleship()
    gm = re.match(r"^goofspiel(\d*)(_imp)?$", name)
    if gm:
        n = int(gm.group(1)) if gm.group(1) else (args[0] if args else 5)
        imp = bool(gm.group(2)) or ("imp" in args)
        return Goofspiel(n, imp)
    raise GameError(f"unknown game {name!r}")


def build_game(spec: str, stats_only: bool = False) -> CompiledGame:
    """Build and compile a game from its spec string."""
    return CompiledGame(build_rules(spec), stats_only=stats_only)


def available_games() -> list[str]:
    return ["rps", "kuhn", "leduc", "leduc(9,2)", "fhp", "goofspiel4",
            "goofspiel4_imp", "goofspiel5", "liars_dice", "battleship"]
