"""Point containers, metric descriptors and dense distance matrices.

Every depth in this package consumes distances only, so this module is the
single place where coordinates are turned into numbers the estimators use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelDescriptor, kernel_cross_distances, parse_kernel

UNIT_NORM_TOL = 1e-9
TRIANGLE_TOL = 1e-9

# rows per block when broadcasting differences; caps memory at ~block*n*p floats
_BLOCK_ELEMENTS = 4_000_000

METRIC_KINDS = (
    "euclidean",
    "lp",
    "arclength",
    "hamming",
    "discrete",
    "rail",
    "kernel",
    "knngraph",
)


class MetricError(ValueError):
    """Raised when points do not satisfy the requirements of a metric."""


@dataclass(frozen=True)
class MetricDescriptor:
    """Declarative choice of metric.

    ``p`` is used by ``lp``, ``kernel`` by ``kernel`` and ``k`` by
    ``knngraph`` (neighbours per vertex; the base metric is euclidean).
    """

    kind: str = "euclidean"
    p: float | None = None
    kernel: KernelDescriptor | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise MetricError(f"unknown metric kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or not np.isfinite(self.p) or self.p <= 0:
                raise MetricError(f"lp metric requires p > 0, got {self.p!r}")
        if self.kind == "kernel" and self.kernel is None:
            raise MetricError("kernel metric requires a KernelDescriptor")
        if self.kind == "knngraph":
            if self.k is None or int(self.k) != self.k or self.k < 1:
                raise MetricError(f"knngraph metric requires integer k >= 1, got {self.k!r}")

    @property
    def is_true_metric(self) -> bool:
        """False only for lp with p < 1, where the triangle inequality fails."""
        return not (self.kind == "lp" and self.p < 1)

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{self.p:g}"
        if self.kind == "kernel":
            return f"kernel:{self.kernel}"
        if self.kind == "knngraph":
            return f"knn:{self.k}"
        return self.kind


def parse_metric(text: str) -> MetricDescriptor:
    """Parse the flat metric grammar used on the command line.

    Accepted forms: ``euclidean``, ``lp:<p>``, ``arclength``, ``hamming``,
    ``discrete``, ``rail``, ``kernel:gaussian:<gamma>``, ``kernel:rq``,
    ``kernel:linear`` and ``knn:<k>``.
    """
    head, _, rest = text.strip().partition(":")
    head = head.lower()
    try:
        if head == "lp":
            return MetricDescriptor("lp", p=float(rest))
        if head == "kernel":
            return MetricDescriptor("kernel", kernel=parse_kernel(rest))
        if head in ("knn", "knngraph"):
            return MetricDescriptor("knngraph", k=int(rest))
    except ValueError as exc:
        raise MetricError(f"malformed metric {text!r}: {exc}") from None
    if rest:
        raise MetricError(f"metric {head!r} takes no parameters, got {text!r}")
    return MetricDescriptor(head)


@dataclass(frozen=True)
class PointSet:
    """n observations in R^p stored row-wise."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise MetricError(f"points must form a non-empty n x p matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise MetricError("points contain non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


def as_points(points) -> np.ndarray:
    if isinstance(points, PointSet):
        return points.data
    return PointSet(points).data


def _check_points(x: np.ndarray, metric: MetricDescriptor):
    if metric.kind == "arclength":
        norms = np.linalg.norm(x, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            raise MetricError(
                f"arclength needs unit-norm points; row {bad[0]} has norm {norms[bad[0]]!r}"
            )
    elif metric.kind == "hamming":
        if not np.all((x == 0) | (x == 1)):
            raise MetricError("hamming needs binary (0/1) data")


def _blocks(m: int, n: int, p: int):
    step = max(1, _BLOCK_ELEMENTS // max(1, n * p))
    for start in range(0, m, step):
        yield slice(start, min(m, start + step))


def _coordinate_cross(x: np.ndarray, y: np.ndarray, metric: MetricDescriptor) -> np.ndarray:
    """Distances between every row of ``x`` and every row of ``y``.

    Each entry is computed from the pair of rows alone, so the result does
    not depend on blocking and is exactly symmetric when ``x is y``.
    """
    kind = metric.kind
    if kind == "lp" and metric.p == 2:
        kind = "euclidean"
    out = np.empty((x.shape[0], y.shape[0]))
    for rows in _blocks(x.shape[0], y.shape[0], x.shape[1]):
        xa = x[rows, None, :]
        if kind == "euclidean":
            out[rows] = np.sqrt(np.sum((xa - y[None]) ** 2, axis=-1))
        elif kind == "lp":
            out[rows] = np.sum(np.abs(xa - y[None]) ** metric.p, axis=-1) ** (1.0 / metric.p)
        elif kind == "arclength":
            # 2*atan2(|x-y|, |x+y|) is the arccos of the clamped inner product,
            # but stays accurate near 0 and pi and is exactly 0 for equal rows
            chord = np.sqrt(np.sum((xa - y[None]) ** 2, axis=-1))
            anti = np.sqrt(np.sum((xa + y[None]) ** 2, axis=-1))
            out[rows] = 2.0 * np.arctan2(chord, anti)
        elif kind == "hamming":
            out[rows] = np.sum(xa != y[None], axis=-1)
        elif kind == "discrete":
            out[rows] = np.any(xa != y[None], axis=-1)
        elif kind == "rail":
            nx = np.sqrt(np.sum(x[rows] ** 2, axis=1))
            ny = np.sqrt(np.sum(y**2, axis=1))
            same = np.all(xa == y[None], axis=-1)
            out[rows] = np.where(same, 0.0, nx[:, None] + ny[None, :])
        else:
            raise MetricError(f"{kind} is not a coordinate metric")
    return out


def cross_distances(points, queries, metric: MetricDescriptor) -> np.ndarray:
    """Distances from each query (rows) to each sample point (columns).

    For ``knngraph`` the graph is built on ``points`` and every query is
    grafted onto it by its k nearest sample points.
    """
    x = as_points(points)
    q = as_points(queries)
    if q.shape[1] != x.shape[1]:
        raise MetricError(f"dimension mismatch: queries have {q.shape[1]}, sample has {x.shape[1]}")
    _check_points(x, metric)
    _check_points(q, metric)
    if metric.kind == "kernel":
        return kernel_cross_distances(q, x, metric.kernel)
    if metric.kind == "knngraph":
        from .graph import build_knn_graph, graft_points, graph_all_pairs

        base = _coordinate_cross(x, x, MetricDescriptor("euclidean"))
        graph = build_knn_graph(base, metric.k)
        geo = graph_all_pairs(graph)
        to_sample = _coordinate_cross(q, x, MetricDescriptor("euclidean"))
        return graft_points(geo, to_sample, metric.k)
    return _coordinate_cross(q, x, metric)


def pairwise_distances(points, metric: MetricDescriptor) -> np.ndarray:
    """Dense n x n distance matrix of a sample under ``metric``."""
    x = as_points(points)
    _check_points(x, metric)
    if metric.kind == "kernel":
        return kernel_cross_distances(x, x, metric.kernel)
    if metric.kind == "knngraph":
        from .graph import build_knn_graph, graph_all_pairs

        base = _coordinate_cross(x, x, MetricDescriptor("euclidean"))
        return graph_all_pairs(build_knn_graph(base, metric.k))
    return _coordinate_cross(x, x, metric)


def distances_to_point(points, mu, metric: MetricDescriptor) -> np.ndarray:
    """Vector of d(X_i, mu) over the sample."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    return cross_distances(points, mu[None, :], metric)[0]


@dataclass
class ValidationReport:
    n: int
    asymmetric_pairs: int = 0
    nonzero_diagonal: int = 0
    negative_entries: int = 0
    nonfinite_entries: int = 0
    triples_checked: int = 0
    triangle_violations: int = 0
    worst_triangle_excess: float = 0.0
    shape_error: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        """Structural validity; triangle violations are informational only."""
        return (
            self.shape_error is None
            and self.asymmetric_pairs == 0
            and self.nonzero_diagonal == 0
            and self.negative_entries == 0
            and self.nonfinite_entries == 0
        )


def validate_distance_matrix(d, spot_checks: int = 1000, seed: int = 0) -> ValidationReport:
    """Check the structural invariants of a distance matrix.

    Never raises. ``spot_checks`` random triples are tested against the
    triangle inequality with tolerance ``TRIANGLE_TOL``; violations are
    counted but do not make the report invalid, since lp with p < 1 breaks
    the triangle inequality by design.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        return ValidationReport(n=0, shape_error=f"expected a square matrix, got shape {d.shape}")
    n = d.shape[0]
    report = ValidationReport(n=n)
    finite = np.isfinite(d)
    report.nonfinite_entries = int(np.sum(~finite))
    with np.errstate(invalid="ignore"):
        report.asymmetric_pairs = int(np.sum(np.triu(d != d.T, 1)))
        report.nonzero_diagonal = int(np.sum(np.diag(d) != 0))
        report.negative_entries = int(np.sum(d < 0))
    if n >= 3 and spot_checks > 0 and report.nonfinite_entries == 0:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, spot_checks))
        excess = d[a, c] - d[a, b] - d[b, c]
        report.triples_checked = int(spot_checks)
        report.triangle_violations = int(np.sum(excess > TRIANGLE_TOL))
        report.worst_triangle_excess = float(max(0.0, excess.max()))
    if report.triangle_violations:
        report.notes.append("triangle inequality violated on sampled triples (expected for lp with p < 1)")
    return report


def check_distance_matrix(d) -> np.ndarray:
    """Return ``d`` as a float array or raise if it is not a valid distance matrix."""
    d = np.asarray(d, dtype=float)
    report = validate_distance_matrix(d, spot_checks=0)
    if not report.is_valid:
        problems = report.shape_error or ", ".join(
            f"{name}={getattr(report, name)}"
            for name in ("asymmetric_pairs", "nonzero_diagonal", "negative_entries", "nonfinite_entries")
            if getattr(report, name)
        )
        raise MetricError(f"invalid distance matrix: {problems}")
    return d
