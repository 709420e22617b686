"""Distance-based depths: metric spatial, lens and half-space.

All functions take distances only. ``dist_to_mu`` is the vector of
d(X_i, mu) over the sample and ``d`` the sample's n x n distance matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METHODS = ("spatial", "lens", "halfspace")
_RANGES = {"spatial": (0.0, 2.0), "lens": (0.0, 1.0), "halfspace": (0.0, 1.0)}


class DepthError(ValueError):
    pass


@dataclass(frozen=True)
class DepthVector:
    values: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise DepthError(f"unknown depth method {self.method!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def value_range(self) -> tuple[float, float]:
        return _RANGES[self.method]

    def __len__(self):
        return len(self.values)


def _inputs(dist_to_mu, d):
    v = np.asarray(dist_to_mu, dtype=float)
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DepthError(f"distance matrix must be square, got shape {d.shape}")
    if v.shape != (d.shape[0],):
        raise DepthError(f"length mismatch: {v.shape[0] if v.ndim else 1} distances for a sample of {d.shape[0]}")
    return v, d


def h_term(d13: float, d23: float, d12: float) -> float:
    """The triangle statistic whose mean defines the spatial depth.

    Zero when x3 coincides with x1 or x2 (a zero distance); otherwise
    (d13^2 + d23^2 - d12^2) / (d13 * d23), which lies in [-2, 2] whenever
    the three distances obey the triangle inequality.
    """
    if d13 == 0 or d23 == 0:
        return 0.0
    return (d13 * d13 + d23 * d23 - d12 * d12) / (d13 * d23)


def _h_sum(v: np.ndarray, d: np.ndarray) -> float:
    keep = v > 0
    a = v[keep]
    if a.size == 0:
        return 0.0
    sub = d[np.ix_(keep, keep)]
    h = (a[:, None] ** 2 + a[None, :] ** 2 - sub**2) / (a[:, None] * a[None, :])
    return float(h.sum())


def spatial_depth(dist_to_mu, d) -> float:
    """Sample metric spatial depth of mu.

    1 - (1 / 2n^2) * sum over all n^2 ordered pairs (i, j), diagonal
    included, of h(X_i, X_j, mu).

    >>> import numpy as np
    >>> x = np.arange(1.0, 6.0)
    >>> round(spatial_depth(np.abs(x - 1), np.abs(x[:, None] - x)), 12)
    0.36
    """
    v, d = _inputs(dist_to_mu, d)
    n = v.shape[0]
    return 1.0 - _h_sum(v, d) / (2.0 * n * n)


def lens_depth(dist_to_mu, d) -> float:
    """Fraction of unordered pairs i < j with d(X_i, X_j) >= max(d(X_i, mu), d(X_j, mu))."""
    v, d = _inputs(dist_to_mu, d)
    n = v.shape[0]
    if n < 2:
        raise DepthError("lens depth needs at least two sample points")
    iu, ju = np.triu_indices(n, 1)
    return float(np.mean(d[iu, ju] >= np.maximum(v[iu], v[ju])))


def halfspace_counts(d) -> np.ndarray:
    """C[a, b] = #{i : d(X_i, X_a) <= d(X_i, X_b)} for every ordered anchor pair."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    counts = np.empty((n, n), dtype=np.int64)
    step = max(1, 4_000_000 // (n * n))
    for start in range(0, n, step):
        cols = d[:, start : start + step]
        counts[start : start + step] = np.sum(cols.T[:, :, None] <= d[None, :, :], axis=1)
    return counts


def _halfspace_from_counts(v: np.ndarray, counts: np.ndarray) -> float:
    n = v.shape[0]
    admissible = v[:, None] <= v[None, :]
    np.fill_diagonal(admissible, False)
    return float(counts[admissible].min()) / n


def halfspace_depth(dist_to_mu, d) -> float:
    """Metric half-space depth with every ordered pair of sample points as anchors.

    Minimises, over anchors (z1, z2) = (X_a, X_b) with a != b and
    d(z1, mu) <= d(z2, mu), the sample fraction with d(X, z1) <= d(X, z2).
    """
    v, d = _inputs(dist_to_mu, d)
    if v.shape[0] < 2:
        raise DepthError("half-space depth needs at least two sample points")
    return _halfspace_from_counts(v, halfspace_counts(d))


def depth_many(dist_to_mus, d, method: str = "spatial") -> DepthVector:
    """Depth of several query points; row q of ``dist_to_mus`` holds d(X_i, mu_q)."""
    rows = np.atleast_2d(np.asarray(dist_to_mus, dtype=float))
    d = np.asarray(d, dtype=float)
    if method == "spatial":
        values = [spatial_depth(row, d) for row in rows]
    elif method == "lens":
        values = [lens_depth(row, d) for row in rows]
    elif method == "halfspace":
        if d.shape[0] < 2:
            raise DepthError("half-space depth needs at least two sample points")
        counts = halfspace_counts(d)
        values = [_halfspace_from_counts(_inputs(row, d)[0], counts) for row in rows]
    else:
        raise DepthError(f"unknown depth method {method!r}; expected one of {METHODS}")
    return DepthVector(np.array(values, dtype=float), method)


def sample_depths(d, method: str = "spatial") -> DepthVector:
    """Depth of every sample point with respect to the whole sample (row k of d is mu = X_k)."""
    return depth_many(d, d, method)


def spatial_depth_all(d) -> DepthVector:
    return sample_depths(d, "spatial")


def _mean_h_with_z(dist_x_to_mu, d_z_mu, dist_x_to_z) -> float:
    a = np.asarray(dist_x_to_mu, dtype=float)
    c = np.asarray(dist_x_to_z, dtype=float)
    if a.shape != c.shape:
        raise DepthError(f"length mismatch: {a.shape} vs {c.shape}")
    if d_z_mu == 0:
        return 0.0
    keep = a > 0
    h = np.zeros_like(a)
    h[keep] = (a[keep] ** 2 + d_z_mu**2 - c[keep] ** 2) / (a[keep] * d_z_mu)
    return float(h.mean())


def influence_function(dist_x_to_mu, d_z_mu: float, dist_x_to_z, depth_mu: float) -> float:
    """Empirical influence of a point mass at z on the depth of mu.

    2 - 2 * depth_mu - mean_i h(X_i, z, mu).
    """
    return 2.0 - 2.0 * depth_mu - _mean_h_with_z(dist_x_to_mu, d_z_mu, dist_x_to_z)


def contaminated_spatial_depth(dist_to_mu, d, d_z_mu: float, dist_x_to_z, eps: float) -> float:
    """Spatial depth of mu under (1 - eps) P_n + eps * delta_z, in closed form."""
    if not 0.0 <= eps <= 1.0:
        raise DepthError(f"eps must lie in [0, 1], got {eps!r}")
    base = spatial_depth(dist_to_mu, d)
    if eps == 0:
        return base
    mean_h = _mean_h_with_z(dist_to_mu, d_z_mu, dist_x_to_z)
    same = 0.0 if d_z_mu == 0 else 1.0
    return 1.0 - 0.5 * (
        2.0 * (1.0 - eps) ** 2 * (1.0 - base) + 2.0 * eps * (1.0 - eps) * mean_h + 2.0 * eps**2 * same
    )
