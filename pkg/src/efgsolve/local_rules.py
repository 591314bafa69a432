"""Local update rules shared by every solver.

Regret matching and regret matching+ map accumulated per-action regrets to the
next simplex decision by positive-part normalization.  The two ``solve_alpha``
root solvers find the water level alpha with ``||[alpha - v]^+||_1 = target``
(resp. ``||[alpha - v]^+||_2^2 = target``) by an exact scan of the sorted
breakpoints; they are deterministic and branch-exact, which the lockstep
equivalence tests rely on.
"""

from __future__ import annotations

import numpy as np

SIMPLEX_TOL = 1e-12

# Padding sentinel for batched solves; solutions never reach this level because
# alpha <= max(v) + max(target, sqrt(target)) for both constraints.
_PAD = 1e18


def positive_part(v: np.ndarray) -> np.ndarray:
    return np.maximum(v, 0.0)


def rm_update(R: np.ndarray, r: np.ndarray):
    """Regret-matching step: returns (R + r, normalized positive part).

    Falls back to the uniform decision when no entry is positive; callers that
    seed the accumulator with a positive value never hit the fallback.  The
    third return flags that event.
    """
    R_next = R + r
    pos = positive_part(R_next)
    norm = pos.sum()
    if norm > 0.0:
        return R_next, pos / norm, False
    n = len(R_next)
    return R_next, np.full(n, 1.0 / n), True


def rm_plus_update(Q: np.ndarray, r: np.ndarray):
    """Regret-matching+ step: returns ([Q + r]^+, its normalization)."""
    Q_next = positive_part(Q + r)
    norm = Q_next.sum()
    if norm > 0.0:
        return Q_next, Q_next / norm, False
    n = len(Q_next)
    return Q_next, np.full(n, 1.0 / n), True


def solve_alpha_l1(v: np.ndarray, target: float) -> float:
    """Solve ``sum_i [alpha - v_i]^+ = target`` for the unique alpha.

    The map alpha -> lhs is piecewise linear, nondecreasing, and unbounded, so
    for target > 0 the root exists and is unique.  The active-set count is the
    largest m whose candidate level clears the m-th sorted breakpoint; that
    condition is monotone in m, which keeps the scan stable when the water
    level sits exactly on a breakpoint.  O(n log n).
    """
    if target <= 0.0:
        raise ValueError("target must be positive")
    u = np.sort(np.asarray(v, dtype=np.float64))
    n = len(u)
    prefix = np.cumsum(u)
    for m in range(n, 0, -1):
        alpha = (target + prefix[m - 1]) / m
        if alpha > u[m - 1]:
            return float(alpha)
    raise ValueError("no feasible water level (non-finite input?)")


def solve_alpha_l2(v: np.ndarray, target: float) -> float:
    """Solve ``sum_i ([alpha - v_i]^+)^2 = target`` for the unique alpha.

    Piecewise quadratic analogue of :func:`solve_alpha_l1`; the candidate is
    the upper root of the m-active quadratic and the same largest-feasible-m
    rule applies.  O(n log n).
    """
    if target <= 0.0:
        raise ValueError("target must be positive")
    u = np.sort(np.asarray(v, dtype=np.float64))
    n = len(u)
    P = np.cumsum(u)
    Q = np.cumsum(u * u)
    for m in range(n, 0, -1):
        disc = P[m - 1] ** 2 - m * (Q[m - 1] - target)
        if disc < 0.0:
            continue
        alpha = (P[m - 1] + np.sqrt(disc)) / m
        if alpha > u[m - 1]:
            return float(alpha)
    raise ValueError("no feasible water level (non-finite input?)")


def _padded(v2: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, v2, _PAD)


def solve_alpha_l1_batch(v2: np.ndarray, mask: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Row-wise ``solve_alpha_l1`` on a padded (k, m) matrix.

    ``mask`` marks real entries; padded entries sit above any feasible water
    level and never activate.  Row i solves with target[i].
    """
    u = np.sort(_padded(v2, mask), axis=1)
    k, m = u.shape
    prefix = np.cumsum(u, axis=1)
    counts = np.arange(1, m + 1)
    cand = (target[:, None] + prefix) / counts
    ok = cand > u
    last = np.where(ok, np.arange(m), -1).max(axis=1)
    return cand[np.arange(k), last]


def solve_alpha_l2_batch(v2: np.ndarray, mask: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Row-wise ``solve_alpha_l2`` on a padded (k, m) matrix."""
    u = np.sort(_padded(v2, mask), axis=1)
    k, m = u.shape
    P = np.cumsum(u, axis=1)
    Q = np.cumsum(u * u, axis=1)
    counts = np.arange(1, m + 1)
    disc = P * P - counts * (Q - target[:, None])
    cand = np.where(disc >= 0.0, (P + np.sqrt(np.maximum(disc, 0.0))) / counts, -np.inf)
    ok = cand > u
    last = np.where(ok, np.arange(m), -1).max(axis=1)
    return cand[np.arange(k), last]
