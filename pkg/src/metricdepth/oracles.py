"""Closed-form spatial depths in a few metric spaces, with sample constructions
that reproduce them through the generic estimator."""

from __future__ import annotations

import math

import numpy as np

from .depth import spatial_depth
from .metrics import MetricDescriptor, distances_to_point, pairwise_distances

PROB_TOL = 1e-12


def sign_vectors(points, mu) -> np.ndarray:
    """Rows (X_i - mu) / |X_i - mu|, with zero rows where X_i == mu."""
    x = np.asarray(getattr(points, "data", points), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu.shape != (x.shape[1],):
        raise ValueError(f"dimension mismatch: mu has shape {mu.shape}, points have {x.shape[1]} columns")
    diff = x - mu
    norms = np.sqrt(np.sum(diff**2, axis=1))
    out = np.zeros_like(diff)
    nz = norms > 0
    out[nz] = diff[nz] / norms[nz, None]
    return out


def hilbert_depth(points, mu) -> float:
    """Euclidean spatial depth 1 - |mean sign(X_i - mu)|^2."""
    s = sign_vectors(points, mu).mean(axis=0)
    return float(1.0 - s @ s)


def _check_probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be a non-empty vector of nonnegative reals")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def discrete_metric_depth(p, index: int) -> float:
    """Depth of atom ``index`` of a finite space under the discrete metric."""
    p = _check_probabilities(p)
    if not 0 <= index < p.size:
        raise ValueError(f"index {index} out of range for {p.size} atoms")
    return float(0.5 * (1.0 - np.sum(p**2)) + p[index])


def discrete_metric_sample(multiplicities) -> np.ndarray:
    """Atom labels with the given integer multiplicities, as a 1-column sample."""
    counts = np.asarray(multiplicities, dtype=int)
    if np.any(counts < 0) or counts.sum() == 0:
        raise ValueError("multiplicities must be nonnegative with a positive total")
    return np.repeat(np.arange(counts.size, dtype=float), counts)[:, None]


def star_graph_bound(n: int) -> float:
    """Largest possible depth of one of n equally weighted distinct points."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1.0 + (1.0 - 1.0 / n) * (1.0 - 3.0 / n)


def star_graph_distance_matrix(n: int, edge_lengths=None) -> np.ndarray:
    """Path metric of a star with hub 0 and leaves 1..n-1.

    ``edge_lengths`` gives the n - 1 hub-to-leaf lengths (all ones if omitted).
    """
    if n < 2:
        raise ValueError(f"a star graph needs n >= 2, got {n}")
    lengths = np.ones(n - 1) if edge_lengths is None else np.asarray(edge_lengths, dtype=float)
    if lengths.shape != (n - 1,):
        raise ValueError(f"expected {n - 1} edge lengths, got {lengths.shape}")
    if np.any(~(lengths > 0)):
        raise ValueError("edge lengths must be strictly positive")
    r = np.concatenate([[0.0], lengths])
    d = r[:, None] + r[None, :]
    np.fill_diagonal(d, 0.0)
    return d


def circle_uniform_depth_finite(k: int) -> float:
    """Depth of a support point of the uniform law on 2k equispaced points of
    the unit circle under arc length."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    j = np.arange(1, k + 1, dtype=float)
    return float(-1.0 + 1.0 / k - 1.0 / (4.0 * k * k) + np.sum(1.0 / j[::-1] ** 2))


CIRCLE_UNIFORM_DEPTH = math.pi**2 / 6.0 - 1.0


def equispaced_circle(m: int, offset: float = 0.0) -> np.ndarray:
    theta = offset + 2.0 * np.pi * np.arange(m) / m
    return np.column_stack([np.cos(theta), np.sin(theta)])


def rail_depth_origin(norms, mu_norm: float) -> float:
    """Rail-metric spatial depth of a point with norm ``mu_norm`` for a sample
    of distinct points with the given (positive) norms.

    Mean over ordered pairs of 2|X_i||X_j| / ((|X_i| + |mu|)(|X_j| + |mu|)),
    which factorises as 2 * (mean |X| / (|X| + |mu|))^2.
    """
    r = np.asarray(norms, dtype=float)
    if r.size == 0 or np.any(~(r > 0)):
        raise ValueError("rail oracle needs strictly positive sample norms")
    if mu_norm < 0:
        raise ValueError("mu_norm must be nonnegative")
    ratio = r / (r + mu_norm)
    return float(2.0 * ratio.mean() ** 2)


def oracle_checks(seed: int = 0) -> list[dict]:
    """Compare every closed form to the estimator on a matching sample.

    Returns one row per check with keys oracle, analytic, empirical, gap,
    tol and passed.
    """
    rows = []

    def add(name, analytic, empirical, tol):
        gap = abs(analytic - empirical)
        rows.append(
            dict(oracle=name, analytic=analytic, empirical=empirical, gap=gap, tol=tol, passed=bool(gap <= tol))
        )

    rng = np.random.default_rng(seed)
    arc = MetricDescriptor("arclength")
    for k in (1, 5, 50, 100):
        x = equispaced_circle(2 * k)
        d = pairwise_distances(x, arc)
        add(f"circle k={k}", circle_uniform_depth_finite(k), spatial_depth(d[0], d), 1e-9)
    add("circle k->inf", CIRCLE_UNIFORM_DEPTH, circle_uniform_depth_finite(100), 1e-2)

    d = star_graph_distance_matrix(11)
    add("star n=11", 2.0 - 41.0 / 121.0, spatial_depth(d[0], d), 1e-12)
    lengths = rng.uniform(0.1, 10.0, size=10)
    d = star_graph_distance_matrix(11, lengths)
    add("star n=11 random lengths", star_graph_bound(11), spatial_depth(d[0], d), 1e-12)

    disc = MetricDescriptor("discrete")
    counts = np.array([3, 1, 0, 2])
    x = discrete_metric_sample(counts)
    d = pairwise_distances(x, disc)
    p = counts / counts.sum()
    for idx in range(counts.size):
        v = distances_to_point(x, [float(idx)], disc)
        add(f"discrete counts={tuple(counts.tolist())} atom {idx}", discrete_metric_depth(p, idx), spatial_depth(v, d), 1e-12)

    rail = MetricDescriptor("rail")
    for n in (5, 50, 500):
        x = rng.normal(size=(n, 2))
        d = pairwise_distances(x, rail)
        v = distances_to_point(x, [0.0, 0.0], rail)
        add(f"rail origin n={n}", 2.0 - 2.0 / n, spatial_depth(v, d), 1e-12)
    x = rng.normal(size=(50, 2))
    d = pairwise_distances(x, rail)
    mu = np.array([3.0, -1.0])
    r = np.linalg.norm(x, axis=1)
    m = float(np.linalg.norm(mu))
    # on i == j pairs the estimator has h = 2, i.e. a zero summand in place of the oracle's
    diagonal = float(np.sum(2.0 * r**2 / (r + m) ** 2)) / r.size**2
    add(
        f"rail |mu|={m:.3g} n=50",
        rail_depth_origin(r, m) - diagonal,
        spatial_depth(distances_to_point(x, mu, rail), d),
        1e-12,
    )

    euc = MetricDescriptor("euclidean")
    x = rng.normal(size=(200, 3))
    mu = rng.normal(size=3)
    d = pairwise_distances(x, euc)
    add("hilbert n=200 p=3", hilbert_depth(x, mu), spatial_depth(distances_to_point(x, mu, euc), d), 1e-10)
    return rows
