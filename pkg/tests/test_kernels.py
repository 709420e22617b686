import math

import numpy as np
import pytest

from metricdepth.depth import sample_depths
from metricdepth.kernels import KernelDescriptor, kernel_distance_matrix, kernel_value, parse_kernel
from metricdepth.metrics import MetricDescriptor, pairwise_distances

GAUSS = KernelDescriptor("gaussian", 0.933)
RQ = KernelDescriptor("rational_quadratic")
LIN = KernelDescriptor("linear")


@pytest.mark.parametrize("kernel", [GAUSS, RQ])
def test_identical_points_give_one(kernel):
    assert kernel_value([0.3, -1.2], [0.3, -1.2], kernel) == 1.0


def test_rq_unit_distance():
    assert kernel_value([0.0, 0.0], [1.0, 0.0], RQ) == 0.5


def test_gaussian_default_gamma():
    assert kernel_value([0.0], [1.0], GAUSS) == pytest.approx(math.exp(-0.933), rel=1e-15)
    assert kernel_value([0.0], [1.0], GAUSS) == pytest.approx(0.3934, abs=1e-4)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_value([0.0], [0.0, 1.0], GAUSS)


def test_gaussian_distance_closed_form_and_bound():
    x = np.array([[0.0, 0.0], [1.0, 1.0], [50.0, 0.0]])
    d = kernel_distance_matrix(x, GAUSS)
    assert d[0, 1] == pytest.approx(math.sqrt(2 * (1 - math.exp(-0.933 * 2))), rel=1e-14)
    assert d[0, 2] == pytest.approx(math.sqrt(2), rel=1e-14)
    assert np.all(np.diag(d) == 0)


def test_duplicate_rows_zero_distance():
    x = np.array([[0.1, 0.7], [0.1, 0.7], [3.3, -1.0]])
    for kernel in (GAUSS, RQ, LIN):
        d = kernel_distance_matrix(x, kernel)
        assert d[0, 1] == 0.0
        np.testing.assert_array_equal(d, d.T)


def test_linear_kernel_is_euclidean():
    x = np.random.default_rng(0).standard_normal((40, 3))
    np.testing.assert_allclose(
        kernel_distance_matrix(x, LIN), pairwise_distances(x, MetricDescriptor("euclidean")), atol=1e-12
    )


def test_linear_kernel_depth_equals_euclidean_depth():
    x = np.random.default_rng(1).standard_normal((50, 2))
    lin = sample_depths(pairwise_distances(x, MetricDescriptor("kernel", kernel=LIN))).values
    euc = sample_depths(pairwise_distances(x, MetricDescriptor("euclidean"))).values
    np.testing.assert_allclose(lin, euc, atol=1e-10)


@pytest.mark.parametrize("kernel", [GAUSS, RQ, LIN])
def test_kernel_triangle_inequality(kernel):
    x = np.random.default_rng(3).standard_normal((30, 2)) * 2
    d = kernel_distance_matrix(x, kernel)
    assert (d[:, None, :] - d[:, :, None] - d[None]).max() <= 1e-9


@pytest.mark.parametrize("kernel", [GAUSS, RQ])
def test_rigid_motion_invariance(kernel):
    rng = np.random.default_rng(4)
    x = rng.standard_normal((40, 2))
    t = np.pi / 5
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    y = x @ rot.T + np.array([3.0, -2.0])
    metric = MetricDescriptor("kernel", kernel=kernel)
    np.testing.assert_allclose(
        sample_depths(pairwise_distances(y, metric)).values,
        sample_depths(pairwise_distances(x, metric)).values,
        atol=1e-10,
    )


def test_parse_kernel():
    assert parse_kernel("gaussian") == KernelDescriptor("gaussian", 0.933)
    assert parse_kernel("gaussian:2") == KernelDescriptor("gaussian", 2.0)
    assert parse_kernel("rq") == RQ
    with pytest.raises(ValueError):
        parse_kernel("poly")
    with pytest.raises(ValueError):
        KernelDescriptor("gaussian", 0.0)
