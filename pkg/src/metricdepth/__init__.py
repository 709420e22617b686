"""Metric spatial depth and companion depths for data in arbitrary metric spaces."""

from .depth import (
    DepthVector,
    contaminated_spatial_depth,
    depth_many,
    h_term,
    halfspace_depth,
    influence_function,
    lens_depth,
    sample_depths,
    spatial_depth,
    spatial_depth_all,
)
from .kernels import KernelDescriptor, kernel_distance_matrix, kernel_value
from .metrics import (
    MetricDescriptor,
    PointSet,
    cross_distances,
    distances_to_point,
    pairwise_distances,
    parse_metric,
    validate_distance_matrix,
)

__version__ = "0.1.0"
