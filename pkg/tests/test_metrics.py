import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from metricdepth.metrics import (
    MetricDescriptor,
    MetricError,
    PointSet,
    distances_to_point,
    pairwise_distances,
    parse_metric,
    validate_distance_matrix,
)

EUC = MetricDescriptor("euclidean")
ARC = MetricDescriptor("arclength")
RAIL = MetricDescriptor("rail")


def random_orthogonal(p, rng):
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    return q * np.sign(np.diag(r))


def unit_rows(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def test_euclidean_1d():
    assert pairwise_distances([[1.0], [5.0]], EUC)[0, 1] == 4.0


def test_antipodal_arclength():
    u = np.array([0.6, 0.8])
    assert pairwise_distances(np.stack([u, -u]), ARC)[0, 1] == pytest.approx(math.pi, abs=1e-15)


def test_arclength_matches_clamped_arccos():
    rng = np.random.default_rng(3)
    x = unit_rows(rng.standard_normal((20, 4)))
    mu = unit_rows(rng.standard_normal((1, 4)))[0]
    expected = np.arccos(np.clip(x @ mu, -1.0, 1.0))
    np.testing.assert_allclose(distances_to_point(x, mu, ARC), expected, atol=1e-7)


def test_arclength_self_distance_exactly_zero():
    x = unit_rows(np.random.default_rng(0).standard_normal((30, 3)))
    assert np.all(np.diag(pairwise_distances(x, ARC)) == 0.0)


def test_rail_distinct_points():
    assert pairwise_distances([[0.0, 1.0], [1.0, 0.0]], RAIL)[0, 1] == 2.0


def test_rail_to_origin():
    np.testing.assert_array_equal(distances_to_point([[1.0, 0.0], [0.0, 2.0]], [0.0, 0.0], RAIL), [1.0, 2.0])


def test_lp_half():
    d = pairwise_distances([[0.0, 0.0], [1.0, 1.0]], MetricDescriptor("lp", p=0.5))
    assert d[0, 1] == pytest.approx((1.0 + 1.0) ** 2, rel=1e-15)


def test_distances_to_point_1d():
    np.testing.assert_array_equal(distances_to_point([[1.0], [2.0], [3.0]], [2.0], EUC), [1.0, 0.0, 1.0])


def test_hamming_and_discrete():
    x = np.array([[0, 1, 1], [1, 1, 0], [0, 1, 1]], dtype=float)
    np.testing.assert_array_equal(pairwise_distances(x, MetricDescriptor("hamming"))[0], [0, 2, 0])
    disc = pairwise_distances(x, MetricDescriptor("discrete"))
    assert set(np.unique(disc)) <= {0.0, 1.0}
    np.testing.assert_array_equal(disc[0], [0, 1, 0])


@pytest.mark.parametrize(
    "metric, points",
    [
        (ARC, [[1.0, 0.0], [0.5, 0.5]]),
        (MetricDescriptor("hamming"), [[0.0, 2.0], [1.0, 0.0]]),
    ],
)
def test_precondition_errors(metric, points):
    with pytest.raises(MetricError):
        pairwise_distances(points, metric)


@pytest.mark.parametrize("p", [0.0, -1.0, float("nan")])
def test_lp_rejects_nonpositive_p(p):
    with pytest.raises(MetricError):
        MetricDescriptor("lp", p=p)


def test_is_true_metric_flag():
    assert not MetricDescriptor("lp", p=0.5).is_true_metric
    assert MetricDescriptor("lp", p=1.0).is_true_metric
    assert EUC.is_true_metric


def test_pointset_invariants():
    assert PointSet([1.0, 2.0]).p == 1
    with pytest.raises(MetricError):
        PointSet(np.array([[np.inf, 0.0]]))
    with pytest.raises(MetricError):
        PointSet(np.empty((0, 2)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("euclidean", MetricDescriptor("euclidean")),
        ("lp:0.5", MetricDescriptor("lp", p=0.5)),
        ("knn:8", MetricDescriptor("knngraph", k=8)),
        ("rail", MetricDescriptor("rail")),
    ],
)
def test_parse_metric(text, expected):
    assert parse_metric(text) == expected


def test_parse_metric_kernel_roundtrip():
    m = parse_metric("kernel:gaussian:0.933")
    assert m.kernel.gamma == 0.933
    assert parse_metric(str(m)) == m
    assert parse_metric("kernel:rq").kernel.kind == "rational_quadratic"


@pytest.mark.parametrize("text", ["lp", "lp:x", "knn:0", "bogus", "rail:3"])
def test_parse_metric_errors(text):
    with pytest.raises(MetricError):
        parse_metric(text)


def test_validation_clean_euclidean():
    x = np.random.default_rng(1).standard_normal((40, 3))
    report = validate_distance_matrix(pairwise_distances(x, EUC), spot_checks=2000, seed=1)
    assert report.is_valid and report.triangle_violations == 0


def test_validation_lp_half_reports_without_error():
    d = pairwise_distances([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], MetricDescriptor("lp", p=0.5))
    # brute force over all triples: d(a,c) = 4 > d(a,b) + d(b,c) = 2
    brute = sum(
        d[a, c] > d[a, b] + d[b, c] + 1e-9 for a in range(3) for b in range(3) for c in range(3)
    )
    assert brute > 0
    report = validate_distance_matrix(d, spot_checks=500, seed=0)
    assert report.is_valid
    assert report.triangle_violations > 0


def test_validation_flags_asymmetry():
    d = np.array([[0.0, 1.0], [2.0, 0.0]])
    report = validate_distance_matrix(d, spot_checks=10)
    assert report.asymmetric_pairs == 1 and not report.is_valid


def test_validation_never_raises_on_garbage():
    assert validate_distance_matrix(np.ones(3)).shape_error
    assert validate_distance_matrix(np.array([[0.0, np.nan], [np.nan, 0.0]])).nonfinite_entries == 2


@pytest.mark.parametrize(
    "metric, make",
    [
        (EUC, lambda rng: rng.standard_normal((25, 3))),
        (MetricDescriptor("lp", p=1.0), lambda rng: rng.standard_normal((25, 3))),
        (MetricDescriptor("lp", p=3.5), lambda rng: rng.standard_normal((25, 3))),
        (ARC, lambda rng: unit_rows(rng.standard_normal((25, 3)))),
        (MetricDescriptor("hamming"), lambda rng: rng.integers(0, 2, (25, 6)).astype(float)),
        (MetricDescriptor("discrete"), lambda rng: rng.integers(0, 3, (25, 1)).astype(float)),
        (RAIL, lambda rng: rng.standard_normal((25, 2))),
    ],
)
def test_triangle_inequality_true_metrics(metric, make):
    d = pairwise_distances(make(np.random.default_rng(11)), metric)
    n = d.shape[0]
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]  # d(a,c) - d(a,b) - d(b,c)
    assert excess.max() <= 1e-9
    np.testing.assert_array_equal(d, d.T)
    assert np.all(np.diag(d) == 0) and d.min() >= 0 and n == 25


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 6))
def test_orthogonal_invariance(seed, p):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((12, p))
    o = random_orthogonal(p, rng)
    np.testing.assert_allclose(pairwise_distances(x @ o.T, EUC), pairwise_distances(x, EUC), atol=1e-12)
    s = unit_rows(x)
    np.testing.assert_allclose(pairwise_distances(s @ o.T, ARC), pairwise_distances(s, ARC), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(bits=arrays(np.int8, (8, 5), elements=st.integers(0, 1)), flip=st.integers(0, 4))
def test_hamming_bit_flip_invariance(bits, flip):
    x = bits.astype(float)
    y = x.copy()
    y[:, flip] = 1.0 - y[:, flip]
    ham = MetricDescriptor("hamming")
    np.testing.assert_array_equal(pairwise_distances(x, ham), pairwise_distances(y, ham))


def test_blocking_does_not_change_results(monkeypatch):
    import metricdepth.metrics as mod

    x = np.random.default_rng(5).standard_normal((60, 4))
    full = pairwise_distances(x, MetricDescriptor("lp", p=1.5))
    monkeypatch.setattr(mod, "_BLOCK_ELEMENTS", 7)
    np.testing.assert_array_equal(pairwise_distances(x, MetricDescriptor("lp", p=1.5)), full)
