"""Seeded simulation studies: sphere outliers, contour grids and Lp DD-classification.

Replicate r of any study draws from ``numpy.random.default_rng(seed + r)``,
so results do not depend on how replicates are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .ddclass import LabeledSample, classify, depth_features, fit_classifier
from .depth import METHODS, depth_many, sample_depths
from .metrics import MetricDescriptor, cross_distances, pairwise_distances

FULL_LAMBDAS = (1 / 4, 1 / 3, 1 / 2)
FULL_SIZES = (50, 100)
FULL_EPS = tuple(round(0.01 * i, 2) for i in range(1, 31))
ARCLENGTH = MetricDescriptor("arclength")


class StudyError(ValueError):
    pass


def _map(fn, items, threads: int | None):
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def split_sizes(n: int, eps: float) -> tuple[int, int]:
    """(bulk, outliers) with bulk = (1 - eps) n rounded half up."""
    bulk = int(math.floor((1.0 - eps) * n + 0.5))
    return bulk, n - bulk


def gen_sphere_mixture(n: int, lam: float, eps: float, seed: int, dim: int = 10) -> LabeledSample:
    """Unit-sphere sample: bulk around +lam*1, outliers around -lam*1 (label 1)."""
    if lam <= 0:
        raise StudyError(f"lambda must be positive, got {lam}")
    bulk, outliers = split_sizes(n, eps)
    if not 0 < eps < 0.5 or outliers < 1:
        raise StudyError(f"n={n}, eps={eps} gives {outliers} outliers; need 0 < eps < 0.5 and at least one")
    rng = np.random.default_rng(seed)
    centres = np.concatenate([np.full(bulk, lam), np.full(outliers, -lam)])
    x = centres[:, None] + rng.standard_normal((n, dim))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms == 0):
        bad = norms == 0
        x[bad] = centres[bad, None] + rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    labels = np.concatenate([np.zeros(bulk, dtype=int), np.ones(outliers, dtype=int)])
    return LabeledSample(x / norms[:, None], labels)


def crossing_statistic(depths, labels) -> float:
    """Share of (bulk, outlier) pairs where the outlier is at least as deep.

    0 means every outlier is strictly shallower than every bulk point.
    """
    depths = np.asarray(getattr(depths, "values", depths), dtype=float)
    labels = np.asarray(labels)
    bulk, out = depths[labels == 0], depths[labels == 1]
    if bulk.size == 0 or out.size == 0:
        raise StudyError("crossing statistic needs both bulk (0) and outlier (1) labels")
    return float(np.mean(out[None, :] >= bulk[:, None]))


@dataclass
class OutlierStudyConfig:
    n: int | list[int] = 100
    lam: float | list[float] = 0.5
    eps_grid: list[float] = field(default_factory=lambda: [0.05, 0.10])
    replications: int = 100
    seed: int = 0
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    dim: int = 10

    def __post_init__(self):
        self.n = [self.n] if isinstance(self.n, int) else list(self.n)
        self.lam = [self.lam] if isinstance(self.lam, (int, float)) else list(self.lam)
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise StudyError(f"unknown depth methods {sorted(unknown)}")
        if self.replications < 1:
            raise StudyError("replications must be >= 1")
        for lam in self.lam:
            if lam <= 0:
                raise StudyError(f"lambda must be positive, got {lam}")
        for n in self.n:
            for eps in self.eps_grid:
                if not 0 < eps < 0.5 or split_sizes(n, eps)[1] < 1:
                    raise StudyError(f"n={n}, eps={eps} yields no outliers")

    @classmethod
    def full_grid(cls, replications: int = 1000, seed: int = 0) -> list["OutlierStudyConfig"]:
        """The full lambda x n x eps sweep, one config per n (eps values that
        round to zero outliers at that n are left out)."""
        return [
            cls(
                n=n,
                lam=list(FULL_LAMBDAS),
                eps_grid=[e for e in FULL_EPS if split_sizes(n, e)[1] >= 1],
                replications=replications,
                seed=seed,
            )
            for n in FULL_SIZES
        ]


def _outlier_replicate(args):
    n, lam, eps, seed, methods, dim = args
    sample = gen_sphere_mixture(n, lam, eps, seed, dim)
    d = pairwise_distances(sample.points, ARCLENGTH)
    return {m: crossing_statistic(sample_depths(d, m), sample.labels) for m in methods}


def run_outlier_study(config: OutlierStudyConfig, threads: int | None = None) -> list[dict]:
    """Mean crossing statistic per (method, lambda, n, eps).

    All methods see the same replicate samples, so comparisons are paired.
    """
    rows = []
    for lam in config.lam:
        for n in config.n:
            for eps in config.eps_grid:
                jobs = [(n, lam, eps, config.seed + r, config.methods, config.dim) for r in range(config.replications)]
                reps = _map(_outlier_replicate, jobs, threads)
                for m in config.methods:
                    rows.append(
                        dict(method=m, lam=lam, n=n, eps=eps, mean_C=float(np.mean([rep[m] for rep in reps])))
                    )
    return rows


def gen_circle_data(n: int = 150, seed: int = 0) -> np.ndarray:
    """Noisy circle of radius 2: 2 (cos t, sin t) + sqrt(0.1) * N(0, I)."""
    if n < 1:
        raise StudyError("n must be >= 1")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    noise = rng.standard_normal((n, 2))
    return 2.0 * np.column_stack([np.cos(theta), np.sin(theta)]) + math.sqrt(0.1) * noise


@dataclass
class ContourGrid:
    xs: np.ndarray
    ys: np.ndarray
    depth: np.ndarray  # shape (len(ys), len(xs))
    metric: str
    method: str = "spatial"

    def rows(self):
        """(x, y, depth) triples in row-major order over the grid."""
        gx, gy = np.meshgrid(self.xs, self.ys)
        return list(zip(gx.ravel().tolist(), gy.ravel().tolist(), self.depth.ravel().tolist()))


def grid_nodes(bounds=(-4.0, 4.0, -4.0, 4.0), resolution: int = 60):
    xmin, xmax, ymin, ymax = bounds
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    gx, gy = np.meshgrid(xs, ys)
    return xs, ys, np.column_stack([gx.ravel(), gy.ravel()])


def contour_grid(
    sample,
    metric: MetricDescriptor,
    bounds=(-4.0, 4.0, -4.0, 4.0),
    resolution: int = 60,
    method: str = "spatial",
) -> ContourGrid:
    """Depth of every node of a regular grid relative to ``sample``.

    Under a kNN-graph metric each node is grafted onto the sample graph.
    """
    xs, ys, nodes = grid_nodes(bounds, resolution)
    d = pairwise_distances(sample, metric)
    values = depth_many(cross_distances(sample, nodes, metric), d, method).values
    return ContourGrid(xs, ys, values.reshape(len(ys), len(xs)), str(metric), method)


def depth_at(sample, queries, metric: MetricDescriptor, method: str = "spatial") -> np.ndarray:
    d = pairwise_distances(sample, metric)
    return depth_many(cross_distances(sample, np.atleast_2d(queries), metric), d, method).values


def gen_gaussian_classes(
    n_per_class: int, n_classes: int = 3, dim: int = 5, separation: float = 4.0, seed: int = 0
) -> LabeledSample:
    """Isotropic unit-variance Gaussian classes whose means are pairwise
    ``separation`` apart (scaled basis vectors)."""
    if n_classes > dim:
        raise StudyError("need dim >= n_classes to place equidistant means")
    rng = np.random.default_rng(seed)
    means = separation / math.sqrt(2.0) * np.eye(dim)[:n_classes]
    labels = np.repeat(np.arange(n_classes), n_per_class)
    return LabeledSample(means[labels] + rng.standard_normal((labels.size, dim)), labels)


def _draw_split(data: LabeledSample, n_train: int, n_test: int, seed: int):
    if n_train + n_test > data.points.n:
        raise StudyError(f"cannot draw {n_train}+{n_test} points from {data.points.n}")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(data.points.n)[: n_train + n_test]
    tr, te = idx[:n_train], idx[n_train:]
    x, y = data.points.data, data.labels
    present = np.unique(y[tr])
    # relabel so the training labels are 0..G'-1; test labels absent from training can never be predicted
    remap = {int(g): i for i, g in enumerate(present)}
    ytr = np.array([remap[int(g)] for g in y[tr]])
    yte = np.array([remap.get(int(g), -1) for g in y[te]])
    return LabeledSample(x[tr], ytr), x[te], yte


def _lp_metric(p: float) -> MetricDescriptor:
    return MetricDescriptor("lp", p=float(p))


def _lp_replicate(args):
    data, n_train, n_test, metrics, classifiers, method, seed = args
    train, test_x, test_y = _draw_split(data, n_train, n_test, seed)
    out = {}
    for key, metric in metrics:
        z_train = depth_features(train, train.points, metric, method)
        z_test = depth_features(train, test_x, metric, method)
        for c in classifiers:
            model = fit_classifier(c, z_train, train.labels)
            out[(key, c)] = float(np.mean(classify(model, z_test) == test_y))
    return out


def lp_classification_study(
    data: LabeledSample,
    p_grid=(0.5, 1.0, 2.0, 3.0, 5.0),
    classifiers=("lda", "qda"),
    n_train: int = 150,
    n_test: int = 50,
    replications: int = 20,
    seed: int = 0,
    method: str = "spatial",
    metrics: list[tuple[str, MetricDescriptor]] | None = None,
    threads: int | None = None,
) -> list[dict]:
    """Mean test accuracy of DD-classification per (metric, classifier).

    Each replicate draws ``n_train`` training and ``n_test`` test points
    from ``data`` without replacement. By default the metrics are Lp
    distances for every p in ``p_grid``; pass ``metrics`` as
    (label, descriptor) pairs to compare others on the same splits.
    """
    if metrics is None:
        metrics = [(f"{float(p):g}", _lp_metric(p)) for p in p_grid]
    jobs = [(data, n_train, n_test, metrics, tuple(classifiers), method, seed + r) for r in range(replications)]
    reps = _map(_lp_replicate, jobs, threads)
    rows = []
    for key, metric in metrics:
        for c in classifiers:
            accs = [rep[(key, c)] for rep in reps]
            rows.append(dict(metric=str(metric), p=metric.p if metric.kind == "lp" else "", classifier=c,
                             mean_accuracy=float(np.mean(accs)), replications=replications))
    return rows


def config_dict(config: OutlierStudyConfig) -> dict:
    return asdict(config)
