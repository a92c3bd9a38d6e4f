import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mqsobolev.grid import (
    GridFunction,
    ball_indices,
    custom_table,
    gradient,
    gridfunction_to_csv,
    holder_cusp,
    indicator,
    lens_indices,
    make_grid,
    polynomial,
    sample,
    sin_composite,
    weierstrass,
)


def test_make_grid_1d_counts():
    g = make_grid(1, 0.0, 1.0, 0.5)
    assert g.counts == (3,)
    assert np.allclose(g.points().ravel(), [0.0, 0.5, 1.0])


def test_make_grid_2d_corners():
    g = make_grid(2, (0, 0), (1, 1), 1.0)
    assert g.counts == (2, 2)
    assert g.n_points == 4


@pytest.mark.parametrize(
    "args",
    [
        (1, 0.0, 1.0, 0.0),       # nonpositive spacing
        (1, 0.0, 1.0, -0.1),
        (1, 0.0, 0.05, 0.1),      # extent below spacing
        (3, (0, 0, 0), (1, 1, 1), 0.5),  # unsupported dimension
    ],
)
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_coordinates_bit_exact():
    g = make_grid(1, -1.0, 2.0, 0.1)
    pts = g.points().ravel()
    for i in range(g.n_points):
        assert pts[i] == -1.0 + i * 0.1
    g2 = make_grid(2, (0.25, -0.5), (1.0, 1.0), 0.125)
    for flat in (0, 5, g2.n_points - 1):
        m = g2.multi_index(flat)
        assert g2.coord(flat)[0] == 0.25 + m[0] * 0.125
        assert g2.coord(flat)[1] == -0.5 + m[1] * 0.125


def test_sample_linear():
    g = make_grid(1, 0.0, 1.0, 0.5)
    f = sample(polynomial([0, 1]), g)
    assert np.array_equal(f.values, [0.0, 0.5, 1.0])


def test_sample_cusp_value():
    assert holder_cusp(0.5)(0.25) == 0.5


def test_sample_weierstrass_truncated_sum_at_zero():
    # all cosines equal 1 at x = 0, so the value is the geometric sum
    expected = sum(0.5**k for k in range(30))
    g = make_grid(1, 0.0, 1.0, 0.5)
    f = sample(weierstrass(0.5, 3, 30), g)
    assert f.values[0] == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(2 * (1 - 0.5**30), rel=1e-15)


@pytest.mark.parametrize(
    "bad",
    [
        lambda: holder_cusp(0.0),
        lambda: holder_cusp(1.5),
        lambda: weierstrass(1.5, 3, 30),   # a outside (0,1)
        lambda: weierstrass(0.5, 4, 30),   # even b
        lambda: weierstrass(0.2, 3, 30),   # ab < 1
        lambda: weierstrass(0.5, 3, 0),    # no terms
        lambda: indicator(0.75, 0.25),     # lo >= hi
    ],
)
def test_testfunction_invariants(bad):
    with pytest.raises(ValueError):
        bad()


def test_custom_table_requires_matching_length():
    g = make_grid(1, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        sample(custom_table([1.0, 2.0]), g)
    f = sample(custom_table([1.0, 2.0, 3.0]), g)
    assert np.array_equal(f.values, [1.0, 2.0, 3.0])


def test_gridfunction_rejects_nonfinite():
    g = make_grid(1, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        GridFunction(g, np.array([0.0, np.inf, 1.0]))


def test_ball_indices_examples():
    g = make_grid(1, 0.0, 1.0, 0.5)
    assert sorted(ball_indices(g, 1, 0.6)) == [0, 2]
    assert ball_indices(g, 1, 0.4).size == 0
    g2 = make_grid(2, (0, 0), (1, 1), 1.0)
    got = sorted(ball_indices(g2, 0, 1.2))
    assert got == [g2.flat_index((0, 1)), g2.flat_index((1, 0))]


def test_ball_excludes_exact_radius_shell():
    g = make_grid(1, 0.0, 1.0, 0.25)
    # radius exactly 2h: the points two steps away sit on the boundary
    ball = ball_indices(g, 2, 0.5)
    assert sorted(ball) == [1, 3]


def test_ball_rejects_bad_radius():
    g = make_grid(1, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        ball_indices(g, 0, 0.0)


@given(st.integers(1, 30), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_ball_monotone_in_radius(center, r1, r2):
    g = make_grid(1, 0.0, 2.0, 1 / 16)
    lo, hi = sorted((r1, r2))
    s_lo = set(ball_indices(g, center, lo))
    s_hi = set(ball_indices(g, center, hi))
    assert s_lo <= s_hi


def test_lens_examples_1d():
    g = make_grid(1, 0.0, 1.0, 0.25)
    assert sorted(lens_indices(g, 0, 4)) == [1, 2, 3]
    assert lens_indices(g, 0, 1).size == 0
    with pytest.raises(ValueError):
        lens_indices(g, 2, 2)


def test_lens_example_2d_brute_force():
    g = make_grid(2, (0, 0), (1, 1), 0.5)
    x = g.flat_index((0, 0))
    y = g.flat_index((2, 0))  # the point (1, 0)
    got = set(lens_indices(g, x, y))
    pts = g.points()
    r = np.linalg.norm(pts[y] - pts[x])
    expected = {
        i
        for i in range(g.n_points)
        if i not in (x, y)
        and np.linalg.norm(pts[i] - pts[x]) < r
        and np.linalg.norm(pts[i] - pts[y]) < r
    }
    assert got == expected
    assert g.flat_index((1, 0)) in got


def test_lens_symmetry_and_inclusion():
    g = make_grid(2, (0, 0), (1, 1), 0.25)
    pts = g.points()
    rng = np.random.default_rng(3)
    for _ in range(40):
        x, y = rng.integers(0, g.n_points, 2)
        if x == y:
            continue
        a = set(lens_indices(g, int(x), int(y)))
        b = set(lens_indices(g, int(y), int(x)))
        assert a == b
        r = np.linalg.norm(pts[y] - pts[x])
        bx = set(ball_indices(g, int(x), r))
        by = set(ball_indices(g, int(y), r))
        assert a <= (bx & by)
        for z in a:
            assert np.linalg.norm(pts[z] - pts[x]) <= r
            assert np.linalg.norm(pts[z] - pts[y]) <= r


def test_gradient_linear_and_constant():
    g = make_grid(1, 0.0, 1.0, 0.25)
    f = sample(polynomial([0, 1]), g)
    assert np.allclose(gradient(f).ravel(), 1.0, atol=1e-14)
    fc = sample(polynomial([3.0]), g)
    assert np.array_equal(gradient(fc).ravel(), np.zeros(g.n_points))


def test_gradient_quadratic_exact_interior():
    g = make_grid(1, 0.0, 1.0, 0.25)
    f = sample(polynomial([0, 0, 1]), g)
    grad = gradient(f).ravel()
    # central differences are exact on quadratics
    assert grad[2] == pytest.approx(1.0, abs=1e-14)
    xs = g.points().ravel()
    assert np.allclose(grad[1:-1], 2 * xs[1:-1], atol=1e-13)


def test_gradient_2d_degree2_exact_interior():
    g = make_grid(2, (0, 0), (1, 1), 0.25)
    pts = g.points()
    vals = pts[:, 0] ** 2 + 0.5 * pts[:, 1] ** 2 - pts[:, 0] * 0.25
    f = GridFunction(g, vals)
    grad = gradient(f)
    interior = [
        i
        for i in range(g.n_points)
        if 0 < g.multi_index(i)[0] < g.counts[0] - 1
        and 0 < g.multi_index(i)[1] < g.counts[1] - 1
    ]
    for i in interior:
        assert grad[i, 0] == pytest.approx(2 * pts[i, 0] - 0.25, abs=1e-13)
        assert grad[i, 1] == pytest.approx(pts[i, 1], abs=1e-13)


def test_gradient_needs_three_points():
    g = make_grid(1, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        gradient(sample(polynomial([0, 1]), g))


def test_csv_round_trip_precision():
    g = make_grid(1, 0.0, 1.0, 1 / 3)
    f = sample(sin_composite(1.0), g)
    text = gridfunction_to_csv(f)
    lines = text.strip().split("\n")
    assert lines[0] == "index,coord0,value"
    assert len(lines) == 1 + g.n_points
    for i, line in enumerate(lines[1:]):
        idx, coord, value = line.split(",")
        assert int(idx) == i
        assert float(coord) == g.points()[i, 0]
        assert float(value) == f.values[i]


def test_indicator_closed_box_2d():
    g = make_grid(2, (0, 0), (1, 1), 0.25)
    f = sample(indicator(0.25, 0.75), g)
    pts = g.points()
    inside = (
        (pts[:, 0] >= 0.25) & (pts[:, 0] <= 0.75)
        & (pts[:, 1] >= 0.25) & (pts[:, 1] <= 0.75)
    )
    assert np.array_equal(f.values, inside.astype(float))
