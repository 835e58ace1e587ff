import math
from itertools import permutations

import numpy as np
import pytest

from restrictlab.divided_diff import (Sign, build_table, divided_difference, is_n_convex,
                                      is_n_convex_all_windows, largest_homogeneous_subset, symmetric_form)


def random_points(r, m):
    # increasing abscissae with gaps bounded away from zero
    xs = np.cumsum(r.uniform(0.2, 1.0, m))
    return xs / xs[-1], r.standard_normal(m)


# ---------------------------------------------------------------- table

def test_table_examples():
    assert divided_difference([0, 1, 2], [0, 1, 4]) == 1.0
    assert divided_difference([0, 1, 2, 3], [0, 1, 8, 27]) == 1.0
    t = build_table([0, 1, 3], [1, 2, 10])
    assert t.order(1).tolist() == [1.0, 4.0]
    assert t.entry(0, 2) == 1.0
    assert t.to_dict()["table"][0] == [1.0, 2.0, 10.0]


def test_table_validation():
    with pytest.raises(ValueError):
        build_table([0, 1], [1.0])
    with pytest.raises(ValueError):
        build_table([0, 0, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        build_table([1, 0], [1, 2])
    with pytest.raises(ValueError):
        is_n_convex([0, 1], [0, 1], 2)
    with pytest.raises(ValueError):
        largest_homogeneous_subset([0, 1, 2], [0, 1, 2], 0)


def test_recursion_matches_symmetric_form(rng):
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 9))
        xs, ys = random_points(rng, m)
        a, b = divided_difference(xs, ys), symmetric_form(xs, ys)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    assert worst <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_polynomial_shift_invariance(n, rng):
    for _ in range(50):
        xs, ys = random_points(rng, n + 1)
        p = np.polyval(rng.standard_normal(n), xs)   # degree n − 1
        a = divided_difference(xs, ys)
        assert divided_difference(xs, ys + p) == pytest.approx(a, rel=1e-8, abs=1e-8)
        # and x^n has n-th divided difference exactly 1
        assert divided_difference(xs, xs ** n) == pytest.approx(1.0, rel=1e-8)


def test_symmetric_form_permutation_symmetric(rng):
    xs, ys = random_points(rng, 5)
    ref = symmetric_form(xs, ys)
    for p in permutations(range(5)):
        p = list(p)
        assert symmetric_form(xs[p], ys[p]) == pytest.approx(ref, rel=1e-10)


# ---------------------------------------------------------------- n-convexity

def test_is_n_convex_examples():
    xs = np.linspace(0, 1, 10)
    assert is_n_convex(xs, xs ** 2, 2)
    assert not is_n_convex(xs, -xs ** 2, 2)
    assert is_n_convex(xs, -xs ** 2, 2, Sign.NEG)
    assert is_n_convex(xs, np.exp(xs), 3)
    # affine data: second differences are zero, neither sign
    assert not is_n_convex(xs, 2 * xs + 1, 2)
    assert not is_n_convex(xs, 2 * xs + 1, 2, "NEG")


@pytest.mark.parametrize("order", [1, 2, 3])
def test_consecutive_windows_equal_all_windows(order, rng):
    # a strict sign on consecutive windows propagates to every (order+1)-subset
    agree = 0
    for _ in range(300):
        xs, _ = random_points(rng, 10)
        ys = np.cumsum(np.abs(rng.standard_normal(10))) if rng.random() < 0.5 else rng.standard_normal(10)
        if order >= 2 and rng.random() < 0.5:
            ys = np.exp(rng.uniform(1, 3) * xs) + rng.normal(0, 0.01, 10)
        for s in (Sign.POS, Sign.NEG):
            a = is_n_convex(xs, ys, order, s, tol=0.0)
            b = is_n_convex_all_windows(xs, ys, order, s, tol=0.0)
            assert a == b
            agree += a
    assert agree > 0


# ---------------------------------------------------------------- homogeneous subsets

def test_homogeneous_examples():
    xs = np.arange(6, dtype=float)
    r = largest_homogeneous_subset(xs, xs ** 2, 2)
    assert r.indices == tuple(range(6)) and r.sign is Sign.POS and r.exact
    r = largest_homogeneous_subset(xs, -xs, 1)
    assert len(r) == 6 and r.sign is Sign.NEG
    # alternating ±1: any three points repeat a value, and a zero difference has neither sign
    alt = np.array([1.0, -1, 1, -1, 1, -1])
    r = largest_homogeneous_subset(xs, alt, 1)
    assert len(r) == 2 and r.indices == (0, 1) and r.sign is Sign.NEG
    # constant data: no pair is coloured
    r = largest_homogeneous_subset(xs, np.ones(6), 1)
    assert r.indices == (0,) and r.sign is None
    assert r.to_dict() == {"indices": [0], "sign": None, "exact": True, "size": 1}


def check_homogeneous(xs, ys, r, order):
    idx = list(r.indices)
    if r.sign is None:
        return
    d = build_table(xs[idx], ys[idx]).order(order)
    assert np.all(d > 0) if r.sign is Sign.POS else np.all(d < 0)


@pytest.mark.parametrize("order", [1, 2])
def test_fast_path_matches_exact_search(order, rng):
    for _ in range(150):
        m = int(rng.integers(order + 1, 13))
        xs, ys = random_points(rng, m)
        ys = np.round(ys, 1)
        a = largest_homogeneous_subset(xs, ys, order, max_exact=16)
        b = largest_homogeneous_subset(xs, ys, order, max_exact=0)
        assert b.exact and len(a) == len(b)
        check_homogeneous(xs, ys, a, order)
        check_homogeneous(xs, ys, b, order)


def test_higher_order_greedy_is_flagged(rng):
    xs, ys = random_points(rng, 30)
    r = largest_homogeneous_subset(xs, ys, 3, max_exact=10)
    assert not r.exact
    check_homogeneous(xs, ys, r, 3)
    assert len(r) >= 3


def test_homogeneous_erdos_szekeres(rng):
    for m in (10, 50, 200, 1000):
        xs = np.arange(m, dtype=float)
        ys = rng.permutation(m).astype(float)
        r = largest_homogeneous_subset(xs, ys, 1)
        assert len(r) >= math.ceil(math.sqrt(m))
        check_homogeneous(xs, ys, r, 1)


def test_homogeneous_order_two_certifies_convexity(rng):
    xs, ys = random_points(rng, 400)
    r = largest_homogeneous_subset(xs, ys, 2)
    idx = list(r.indices)
    s = np.diff(ys[idx]) / np.diff(xs[idx])
    assert np.all(np.diff(s) > 0) if r.sign is Sign.POS else np.all(np.diff(s) < 0)
    assert len(r) >= 3
