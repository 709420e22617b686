import math
from fractions import Fraction

import numpy as np
import pytest

from metricdepth.depth import spatial_depth, spatial_depth_all
from metricdepth.metrics import MetricDescriptor, distances_to_point, pairwise_distances, validate_distance_matrix
from metricdepth.oracles import (
    CIRCLE_UNIFORM_DEPTH,
    circle_uniform_depth_finite,
    discrete_metric_depth,
    discrete_metric_sample,
    equispaced_circle,
    hilbert_depth,
    oracle_checks,
    rail_depth_origin,
    star_graph_bound,
    star_graph_distance_matrix,
)

DISC = MetricDescriptor("discrete")
ARC = MetricDescriptor("arclength")


def test_hilbert_line_values():
    x = np.arange(1.0, 6.0)[:, None]
    assert hilbert_depth(x, [3.0]) == 1.0
    assert hilbert_depth(x, [6.0]) == 0.0


def test_hilbert_1d_quantile_form():
    x = np.random.default_rng(0).standard_normal((101, 1))
    mu = 0.3
    above, below = np.mean(x[:, 0] > mu), np.mean(x[:, 0] < mu)
    assert hilbert_depth(x, [mu]) == pytest.approx(1 - (above - below) ** 2, abs=1e-14)


def test_hilbert_dimension_mismatch():
    with pytest.raises(ValueError):
        hilbert_depth(np.zeros((3, 2)), [0.0])


@pytest.mark.parametrize("p, index, expected", [((1, 0, 0), 0, 1.0), ((0, 1, 0), 0, 0.0), ((0.5, 0.5), 0, 0.75)])
def test_discrete_metric_depth(p, index, expected):
    assert discrete_metric_depth(p, index) == expected


def test_discrete_metric_invalid():
    with pytest.raises(ValueError):
        discrete_metric_depth([0.5, 0.6], 0)
    with pytest.raises(ValueError):
        discrete_metric_depth([1.0], 3)


def test_discrete_two_point_twin():
    x = discrete_metric_sample([1, 1])
    v = distances_to_point(x, [0.0], DISC)
    assert spatial_depth(v, pairwise_distances(x, DISC)) == 0.75


def test_discrete_twin_exact_rational():
    # exact rational arithmetic for one vector as a sanity anchor for the float formula
    counts = [2, 5, 1]
    m = sum(counts)
    p = [Fraction(c, m) for c in counts]
    exact = Fraction(1, 2) * (1 - sum(q * q for q in p)) + p[0]
    assert discrete_metric_depth([float(q) for q in p], 0) == pytest.approx(float(exact), abs=1e-15)


@pytest.mark.parametrize("n, expected", [(11, 2 - 41 / 121), (3, 1.0), (1, 1.0)])
def test_star_graph_bound(n, expected):
    assert star_graph_bound(n) == pytest.approx(expected, abs=1e-15)


def test_star_graph_bound_limits():
    vals = [star_graph_bound(n) for n in range(3, 2000)]
    assert all(v < 2 for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert 2 - star_graph_bound(10**6) < 1e-5
    with pytest.raises(ValueError):
        star_graph_bound(0)


def test_star_graph_hub_depth():
    d = star_graph_distance_matrix(11)
    assert spatial_depth_all(d).values[0] == star_graph_bound(11)
    d = star_graph_distance_matrix(3, [1.0, 7.0])
    assert spatial_depth(d[0], d) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 5, 11, 30])
def test_star_graph_matrix_is_metric(n):
    d = star_graph_distance_matrix(n, np.random.default_rng(n).uniform(0.5, 3.0, n - 1))
    report = validate_distance_matrix(d, spot_checks=3000, seed=n)
    assert report.is_valid and report.triangle_violations == 0


def test_star_graph_errors():
    with pytest.raises(ValueError):
        star_graph_distance_matrix(3, [1.0, 0.0])
    with pytest.raises(ValueError):
        star_graph_distance_matrix(3, [1.0])


def test_circle_formula_values():
    assert circle_uniform_depth_finite(1) == 0.75
    assert circle_uniform_depth_finite(10**6) == pytest.approx(math.pi**2 / 6 - 1, abs=1e-5)
    with pytest.raises(ValueError):
        circle_uniform_depth_finite(0)


def test_circle_formula_decreasing():
    vals = np.array([circle_uniform_depth_finite(k) for k in range(2, 10_001)])
    assert np.all(np.diff(vals) < 0)
    assert vals[-1] > CIRCLE_UNIFORM_DEPTH


def test_circle_antipodal_twin():
    x = equispaced_circle(2)
    d = pairwise_distances(x, ARC)
    assert spatial_depth(d[0], d) == 0.75


@pytest.mark.parametrize("k", [2, 7, 50])
def test_circle_all_support_points_equal(k):
    d = pairwise_distances(equispaced_circle(2 * k), ARC)
    np.testing.assert_allclose(spatial_depth_all(d).values, circle_uniform_depth_finite(k), atol=1e-9)


def test_circle_midpoints_near_support_value():
    # no closed form off the support; continuity says midpoints approach the same limit
    k = 200
    x = equispaced_circle(2 * k)
    d = pairwise_distances(x, ARC)
    mid = equispaced_circle(2 * k, offset=np.pi / (2 * k))[0]
    value = spatial_depth(distances_to_point(x, mid, ARC), d)
    assert value == pytest.approx(CIRCLE_UNIFORM_DEPTH, abs=1e-2)


def test_rail_oracle():
    assert rail_depth_origin([1.0, 2.0, 3.0], 0.0) == 2.0
    assert rail_depth_origin([1.0, 1.0], 1.0) == 0.5
    assert rail_depth_origin([1.0, 2.0], 1e12) < 1e-20
    with pytest.raises(ValueError):
        rail_depth_origin([1.0, 0.0], 1.0)


def test_oracle_check_table_passes():
    rows = oracle_checks()
    assert rows and all(r["passed"] for r in rows)
    assert {"oracle", "analytic", "empirical", "gap", "passed"} <= set(rows[0])
