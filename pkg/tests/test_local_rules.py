"""Local update rules: regret matching and the water-level root solvers.

The water-level solvers are checked against an independent bisection oracle;
the hand-derived cases below were computed with that oracle first.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from efgsolve.local_rules import (
    rm_plus_update,
    rm_update,
    solve_alpha_l1,
    solve_alpha_l1_batch,
    solve_alpha_l2,
    solve_alpha_l2_batch,
)


# -- independent oracles -------------------------------------------------------


def bisect_alpha(f, target, lo, hi, iters=200):
    """Bisection on a nondecreasing f to |f - target| resolution ~1e-12."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def oracle_l1(v, target):
    v = np.asarray(v, dtype=float)
    f = lambda a: np.maximum(a - v, 0.0).sum()
    return bisect_alpha(f, target, float(v.min()), float(v.max()) + target + 1.0)


def oracle_l2(v, target):
    v = np.asarray(v, dtype=float)
    f = lambda a: (np.maximum(a - v, 0.0) ** 2).sum()
    return bisect_alpha(f, target, float(v.min()),
                        float(v.max()) + np.sqrt(target) + 1.0)


finite_vec = st.lists(
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False), min_size=1,
    max_size=8,
)
pos_target = st.floats(min_value=1e-6, max_value=100.0)


# -- l1 water level -------------------------------------------------------------


def test_l1_two_zeros():
    assert solve_alpha_l1(np.array([0.0, 0.0]), 1.0) == pytest.approx(0.5)


def test_l1_hand_case():
    # v = (1, 3), target 2: both entries active gives (a-1)+(a-3) = 2 => a = 3.
    assert solve_alpha_l1(np.array([1.0, 3.0]), 2.0) == pytest.approx(3.0)
    assert oracle_l1([1.0, 3.0], 2.0) == pytest.approx(3.0, abs=1e-10)


@given(finite_vec, pos_target)
@settings(max_examples=200, deadline=None)
def test_l1_matches_bisection(v, target):
    v = np.asarray(v)
    alpha = solve_alpha_l1(v, target)
    assert alpha == pytest.approx(oracle_l1(v, target), abs=1e-10)
    resid = np.maximum(alpha - v, 0.0).sum() - target
    assert abs(resid) <= 1e-11 * max(1.0, target)


@given(finite_vec, pos_target, pos_target)
@settings(max_examples=100, deadline=None)
def test_l1_monotone_in_target(v, t1, t2):
    v = np.asarray(v)
    lo, hi = sorted((t1, t2))
    assert solve_alpha_l1(v, lo) <= solve_alpha_l1(v, hi) + 1e-12


def test_l1_rejects_nonpositive_target():
    with pytest.raises(ValueError):
        solve_alpha_l1(np.array([1.0]), 0.0)


# -- l2 water level -------------------------------------------------------------


def test_l2_two_zeros():
    lam = 3.7
    assert solve_alpha_l2(np.array([0.0, 0.0]), lam) == pytest.approx(np.sqrt(lam / 2))


def test_l2_hand_case():
    # v = (1, 3), target 4: single active entry, (a-1)^2 = 4 at a = 3 with the
    # second entry exactly at the boundary.
    assert solve_alpha_l2(np.array([1.0, 3.0]), 4.0) == pytest.approx(3.0)
    assert oracle_l2([1.0, 3.0], 4.0) == pytest.approx(3.0, abs=1e-9)


@given(finite_vec, pos_target)
@settings(max_examples=200, deadline=None)
def test_l2_matches_bisection(v, target):
    v = np.asarray(v)
    alpha = solve_alpha_l2(v, target)
    assert alpha == pytest.approx(oracle_l2(v, target), abs=1e-9)
    resid = (np.maximum(alpha - v, 0.0) ** 2).sum() - target
    assert abs(resid) <= 1e-11 * max(1.0, target)


def test_residual_bulk(rng):
    """Constraint residual stays below 1e-11 * max(1, target) in bulk."""
    for _ in range(2000):
        n = rng.integers(1, 9)
        v = rng.normal(scale=10.0, size=n)
        target = float(rng.uniform(1e-5, 50.0))
        a1 = solve_alpha_l1(v, target)
        assert abs(np.maximum(a1 - v, 0).sum() - target) <= 1e-11 * max(1, target)
        a2 = solve_alpha_l2(v, target)
        assert abs((np.maximum(a2 - v, 0) ** 2).sum() - target) <= 1e-11 * max(1, target)


def test_exact_breakpoint_ties():
    """Water level exactly on a (repeated) breakpoint must not destabilize."""
    v = np.array([0.0, 1.0, 1.0, 1.0])
    target = 1.0  # alpha = 1 exactly: only the first entry active
    assert solve_alpha_l1(v, target) == pytest.approx(1.0, abs=1e-12)
    assert solve_alpha_l2(v, target) == pytest.approx(1.0, abs=1e-12)


# -- batched solvers ------------------------------------------------------------


def _pad_rows(rows):
    k = len(rows)
    m = max(len(r) for r in rows)
    v2 = np.zeros((k, m))
    mask = np.zeros((k, m), dtype=bool)
    for i, r in enumerate(rows):
        v2[i, :len(r)] = r
        mask[i, :len(r)] = True
    return v2, mask


def test_batch_matches_scalar(rng):
    rows = [rng.normal(scale=5.0, size=rng.integers(1, 7)) for _ in range(300)]
    targets = rng.uniform(1e-4, 20.0, size=len(rows))
    v2, mask = _pad_rows(rows)
    a1 = solve_alpha_l1_batch(v2, mask, targets)
    a2 = solve_alpha_l2_batch(v2, mask, targets)
    for i, r in enumerate(rows):
        assert a1[i] == pytest.approx(solve_alpha_l1(r, targets[i]), rel=1e-12, abs=1e-12)
        assert a2[i] == pytest.approx(solve_alpha_l2(r, targets[i]), rel=1e-12, abs=1e-12)


def test_batch_longdouble_dtype():
    v2, mask = _pad_rows([np.array([1.0, 3.0])])
    out = solve_alpha_l1_batch(v2.astype(np.longdouble), mask, np.array([2.0]))
    assert float(out[0]) == pytest.approx(3.0)


# -- regret matching -------------------------------------------------------------


def test_rm_update_hand_case():
    R, x, dead = rm_update(np.array([2.0, -1.0, 3.0]), np.zeros(3))
    assert np.allclose(x, [0.4, 0.0, 0.6])
    assert not dead


def test_rm_update_symmetry():
    _, x, _ = rm_update(np.array([3.0, 3.0]), np.zeros(2))
    assert np.allclose(x, [0.5, 0.5])


def test_rm_update_all_nonpositive_falls_back_uniform():
    R, x, dead = rm_update(np.array([-1.0, -2.0]), np.zeros(2))
    assert dead
    assert np.allclose(x, [0.5, 0.5])


def test_rm_plus_update_hand_case():
    Q, x, _ = rm_plus_update(np.array([1.0, 0.0]), np.array([-2.0, 1.0]))
    assert np.allclose(Q, [0.0, 1.0])
    assert np.allclose(x, [0.0, 1.0])


def test_rm_plus_zero_regret_is_identity():
    Q0 = np.array([0.25, 0.75])
    Q, x, _ = rm_plus_update(Q0, np.zeros(2))
    assert np.allclose(Q, Q0)
    assert np.allclose(x, [0.25, 0.75])


@given(st.lists(st.floats(-20, 20), min_size=1, max_size=6),
       st.lists(st.floats(-20, 20), min_size=1, max_size=6))
@settings(max_examples=150, deadline=None)
def test_rm_outputs_are_simplex(R, r):
    n = min(len(R), len(r))
    R, r = np.asarray(R[:n]), np.asarray(r[:n])
    for _, x, dead in (rm_update(R, r), rm_plus_update(np.maximum(R, 0), r)):
        assert np.all(x >= 0)
        assert x.sum() == pytest.approx(1.0, abs=1e-12)
