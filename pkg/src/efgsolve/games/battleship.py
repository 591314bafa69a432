"""Battleship on a small grid with one ship per player.

Both players secretly place one ship (any orientation that fits, no overlap
to place since there is a single ship), then alternate firing at distinct
cells of the opponent's grid.  Shots and their hit/miss results are public.
A ship is sunk once all of its cells have been hit, ending the game; otherwise
play stops after a fixed number of shots per player.  The payoff is the value
of the opponent's sunk ship minus the value of one's own.
"""

from __future__ import annotations

from .base import GameRules


def _placements(width: int, height: int, length: int):
    cells = lambda r, c: r * width + c
    spots = []
    for r in range(height):
        for c in range(width - length + 1):
            spots.append(tuple(cells(r, c + i) for i in range(length)))
    for c in range(width):
        for r in range(height - length + 1):
            spots.append(tuple(cells(r + i, c) for i in range(length)))
    return spots


class Battleship(GameRules):
    """State: (ship0, ship1, shots0, shots1); ships are None until placed."""

    def __init__(self, width: int = 3, height: int = 2, ship_length: int = 2,
                 ship_value: float = 4.0, shots_per_player: int = 3):
        self.width = width
        self.height = height
        self.ship_value = ship_value
        self.shots_per_player = shots_per_player
        self.spots = _placements(width, height, ship_length)
        self.all_cells = tuple(range(width * height))
        self.name = "battleship"

    def initial(self):
        return (None, None, (), ())

    def _sunk(self, ship, shots) -> bool:
        return all(c in shots for c in ship)

    def is_terminal(self, s):
        ship0, ship1, shots0, shots1 = s
        if ship0 is None or ship1 is None:
            return False
        if self._sunk(ship1, shots0) or self._sunk(ship0, shots1):
            return True
        return len(shots0) == len(shots1) == self.shots_per_player

    def payoff(self, s):
        ship0, ship1, shots0, shots1 = s
        u = 0.0
        if self._sunk(ship1, shots0):
            u += self.ship_value
        if self._sunk(ship0, shots1):
            u -= self.ship_value
        return u

    def actor(self, s):
        ship0, ship1, shots0, shots1 = s
        if ship0 is None:
            return 0
        if ship1 is None:
            return 1
        return 0 if len(shots0) == len(shots1) else 1

    def actions(self, s):
        ship0, ship1, shots0, shots1 = s
        if ship0 is None or ship1 is None:
            return self.spots
        mine = shots0 if self.actor(s) == 0 else shots1
        return [c for c in self.all_cells if c not in mine]

    def apply(self, s, a):
        ship0, ship1, shots0, shots1 = s
        if ship0 is None:
            return (a, ship1, shots0, shots1)
        if ship1 is None:
            return (ship0, a, shots0, shots1)
        if len(shots0) == len(shots1):
            return (ship0, ship1, shots0 + (a,), shots1)
        return (ship0, ship1, shots0, shots1 + (a,))

    def infoset_key(self, s):
        ship0, ship1, shots0, shots1 = s
        if ship0 is None:
            return (0, "place")
        if ship1 is None:
            return (1, "place")
        p = self.actor(s)
        own_ship = ship0 if p == 0 else ship1
        own_shots = shots0 if p == 0 else shots1
        opp_ship = ship1 if p == 0 else ship0
        opp_shots = shots1 if p == 0 else shots0
        hits = tuple((c, c in opp_ship) for c in own_shots)
        return (p, own_ship, hits, opp_shots)
