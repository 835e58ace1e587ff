import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from restrictlab.generators import FbmParams, fbm_path
from restrictlab.grid import (FunctionMeta, GridSubset, SampledFunction, antiderivative,
                              finite_diff_derivative, grid_points, holder_seminorm, read_function_csv,
                              read_subset, restrict_values, write_function_csv, write_subset)


def fn(func, n):
    return SampledFunction.from_callable(func, n)


# ---------------------------------------------------------------- types

def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction([1.0])
    with pytest.raises(ValueError):
        SampledFunction([0.0, np.nan])
    with pytest.raises(ValueError):
        SampledFunction([0.0, np.inf, 1.0])
    with pytest.raises(ValueError):
        FunctionMeta(seed=-1)
    with pytest.raises(ValueError):
        FunctionMeta(holder_alpha=-0.5)


def test_sampled_function_is_immutable_copy():
    v = np.zeros(5)
    f = SampledFunction(v)
    v[0] = 1.0
    assert f.values[0] == 0.0
    with pytest.raises(ValueError):
        f.values[1] = 2.0


def test_grid_is_exactly_uniform():
    x = grid_points(5)
    assert x.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert SampledFunction(np.zeros(1025)).x[-1] == 1.0


def test_grid_subset_validation():
    assert len(GridSubset(10)) == 0
    with pytest.raises(ValueError):
        GridSubset(5, [0, 5])
    with pytest.raises(ValueError):
        GridSubset(5, [2, 2])
    with pytest.raises(ValueError):
        GridSubset(5, [3, 1])
    A = GridSubset(5, [0, 2, 4])
    assert 2 in A and 3 not in A
    assert A.x.tolist() == [0.0, 0.5, 1.0]
    assert GridSubset(5, [2]).issubset(A)


# ---------------------------------------------------------------- seminorm

def test_holder_constant_and_identity():
    assert holder_seminorm(SampledFunction(np.full(33, 4.2)), 0.5) == 0.0
    assert holder_seminorm(fn(lambda x: x, 65), 1.0) == pytest.approx(1.0, abs=1e-12)


def test_holder_sqrt():
    f = fn(np.sqrt, 1025)
    assert holder_seminorm(f, 0.5) == pytest.approx(1.0, abs=1e-12)


def test_holder_rejects_bad_alpha():
    f = fn(lambda x: x, 9)
    for a in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            holder_seminorm(f, a)


@given(st.floats(-5, 5, allow_nan=False), st.floats(0.1, 1.0))
def test_holder_homogeneous(c, alpha):
    f = fn(lambda x: np.sin(7 * x) + x ** 2, 129)
    cf = f.with_values(c * f.values)
    assert holder_seminorm(cf, alpha) == pytest.approx(abs(c) * holder_seminorm(f, alpha), rel=1e-12, abs=1e-300)


def test_holder_subgrid_never_larger(rng):
    f = SampledFunction(np.cumsum(rng.standard_normal(257)) / 16)
    full = holder_seminorm(f, 0.5)
    sub = SampledFunction(f.values[::4])
    assert holder_seminorm(sub, 0.5) <= full + 1e-12


def test_holder_subsample_flag():
    f = fbm_path(FbmParams(0.5, 2 ** 14 + 1, 3))
    est = holder_seminorm(f, 0.4, subsample=True)
    # the strided grid is a sub-grid, so it cannot exceed the full value; check against a coarser stride
    coarse = SampledFunction(f.values[::4])
    assert est == pytest.approx(holder_seminorm(coarse, 0.4), rel=1e-12)


# ---------------------------------------------------------------- antiderivative / derivative

def test_antiderivative_exact_cases():
    F = antiderivative(SampledFunction(np.ones(101)))
    np.testing.assert_array_equal(F.values, grid_points(101))
    F = antiderivative(fn(lambda x: 2 * x, 1001))
    np.testing.assert_allclose(F.values, grid_points(1001) ** 2, rtol=0, atol=1e-15)
    assert F.values[0] == 0.0


def test_antiderivative_meta_and_riemann_oracle():
    B = fbm_path(FbmParams(0.5, 2 ** 16 + 1, 11))
    F = antiderivative(B)
    assert F.meta.holder_alpha == pytest.approx(1.5)
    # midpoint Riemann sums on the half-resolution grid, using the odd samples only;
    # for a rough path the two rules differ by about one grid step in total
    v = B.values
    h2 = 2.0 / (B.n_points - 1)
    riemann = np.concatenate([[0.0], np.cumsum(v[1::2]) * h2])
    assert np.max(np.abs(F.values[::2] - riemann)) < 1e-4


@given(st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False))
def test_antiderivative_linear(a, b):
    f = fn(np.cos, 257)
    g = fn(lambda x: x ** 3 - x, 257)
    lhs = antiderivative(f.with_values(a * f.values + b * g.values)).values
    rhs = a * antiderivative(f).values + b * antiderivative(g).values
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


def test_derivative_exact_cases():
    d = finite_diff_derivative(fn(lambda x: x, 17)).values
    np.testing.assert_allclose(d, 1.0, rtol=0, atol=1e-12)
    f = fn(lambda x: x ** 2, 101)
    d = finite_diff_derivative(f).values
    np.testing.assert_allclose(d[1:-1], 2 * f.x[1:-1], rtol=0, atol=1e-12)
    with pytest.raises(ValueError):
        finite_diff_derivative(SampledFunction([0.0, 1.0]))


def test_derivative_of_antiderivative_x_cubed():
    g = fn(lambda x: x ** 3, 4097)
    d = finite_diff_derivative(antiderivative(g)).values
    assert np.max(np.abs(d[1:-1] - g.values[1:-1])) <= 1e-6


@pytest.mark.parametrize("coeffs", [(1.0,), (0.5, -2.0)])
def test_derivative_inverts_antiderivative_affine(coeffs):
    f = fn(lambda x: np.polyval(coeffs, x), 201)
    d = finite_diff_derivative(antiderivative(f)).values
    np.testing.assert_allclose(d[1:-1], f.values[1:-1], rtol=0, atol=1e-10)


def test_derivative_inverts_antiderivative_quadratic_offset():
    # trapezoid then central difference maps x² to x² + h²/2 at interior points
    n = 201
    h = 1.0 / (n - 1)
    f = fn(lambda x: 3.0 * x ** 2 - x + 2.0, n)
    d = finite_diff_derivative(antiderivative(f)).values
    np.testing.assert_allclose(d[1:-1] - f.values[1:-1], 3.0 * h * h / 2.0, rtol=0, atol=1e-10)


@pytest.mark.xfail(strict=True, reason="trapezoid + central difference is off by h²/2 on quadratics")
def test_derivative_inverts_antiderivative_quadratic_exactly():
    f = fn(lambda x: x ** 2, 201)
    d = finite_diff_derivative(antiderivative(f)).values
    np.testing.assert_allclose(d[1:-1], f.values[1:-1], rtol=0, atol=1e-10)


# ---------------------------------------------------------------- restriction and files

def test_restrict_values():
    f = fn(lambda x: x, 5)
    xs, ys = restrict_values(f, GridSubset(5, [0, 2, 4]))
    assert xs.tolist() == [0, 0.5, 1] and ys.tolist() == [0, 0.5, 1]
    xs, ys = restrict_values(f, GridSubset(5))
    assert xs.size == 0 and ys.size == 0
    xs, ys = restrict_values(f, GridSubset.full(5))
    np.testing.assert_array_equal(ys, f.values)
    with pytest.raises(ValueError):
        restrict_values(f, GridSubset(6, [0]))


def test_csv_round_trip(tmp_path):
    f = fbm_path(FbmParams(0.3, 65, 5))
    p = tmp_path / "f.csv"
    write_function_csv(f, p)
    assert p.read_text().splitlines()[0] == "x,value"
    g = read_function_csv(p)
    np.testing.assert_array_equal(g.values, f.values)
    assert g.meta == f.meta
    side = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert side["seed"] == 5 and side["holder_alpha"] == 0.3


def test_csv_rejects_bad_input(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n0,1\n1,2\n")
    with pytest.raises(ValueError):
        read_function_csv(p)
    p.write_text("x,value\n0,1\n0.3,2\n1,3\n")
    with pytest.raises(ValueError):
        read_function_csv(p)


def test_subset_round_trip(tmp_path):
    A = GridSubset(100, [1, 5, 99])
    p = tmp_path / "a.txt"
    write_subset(A, p)
    B = read_subset(p)
    assert B.parent_n == 100 and B.indices.tolist() == [1, 5, 99]
    p.write_text("1\n2\n")
    with pytest.raises(ValueError):
        read_subset(p)
    assert read_subset(p, parent_n=3).indices.tolist() == [1, 2]
