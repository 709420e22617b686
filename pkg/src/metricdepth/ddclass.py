"""Depth-depth classification: per-group depths as features, then LDA or QDA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import depth_many
from .metrics import MetricDescriptor, PointSet, as_points, cross_distances, pairwise_distances

RIDGE = 1e-6
MIN_EIGENVALUE = 1e-10


class ClassifierError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSample:
    points: PointSet
    labels: np.ndarray

    def __post_init__(self):
        pts = self.points if isinstance(self.points, PointSet) else PointSet(self.points)
        labels = np.asarray(self.labels)
        if labels.shape != (pts.n,):
            raise ClassifierError(f"{labels.size} labels for {pts.n} points")
        if labels.size and (labels.min() < 0 or not np.issubdtype(labels.dtype, np.integer)):
            raise ClassifierError("labels must be nonnegative integers")
        groups = np.unique(labels)
        if not np.array_equal(groups, np.arange(groups.size)):
            raise ClassifierError(f"labels must cover 0..G-1 without gaps, got {groups.tolist()}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels.astype(int))

    @property
    def n_groups(self) -> int:
        return int(self.labels.max()) + 1

    def group(self, g: int) -> np.ndarray:
        return self.points.data[self.labels == g]


def depth_features(train: LabeledSample, eval_points, metric: MetricDescriptor, method: str = "spatial") -> np.ndarray:
    """z[i, g] = depth of eval point i relative to the empirical law of training group g.

    Training points evaluated against their own group count themselves in
    the empirical distribution (plain plug-in, no leave-one-out).
    """
    queries = as_points(eval_points)
    z = np.empty((queries.shape[0], train.n_groups))
    for g in range(train.n_groups):
        members = train.group(g)
        if members.shape[0] == 0:
            raise ClassifierError(f"group {g} is empty")
        d = pairwise_distances(members, metric)
        z[:, g] = depth_many(cross_distances(members, queries, metric), d, method).values
    return z


@dataclass
class GaussianClassifier:
    """Gaussian class-conditional model; LDA shares one pooled covariance."""

    kind: str
    means: np.ndarray
    covariances: np.ndarray
    priors: np.ndarray

    def scores(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != self.means.shape[1]:
            raise ClassifierError(f"feature dimension {z.shape[1]} does not match model dimension {self.means.shape[1]}")
        out = np.empty((z.shape[0], self.means.shape[0]))
        for g, (mean, cov) in enumerate(zip(self.means, self.covariances)):
            _, logdet = np.linalg.slogdet(cov)
            diff = z - mean
            maha = np.sum(diff * np.linalg.solve(cov, diff.T).T, axis=1)
            out[:, g] = -0.5 * maha - 0.5 * logdet + np.log(self.priors[g])
        return out


def _regularize(cov: np.ndarray) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    dim = cov.shape[0]
    if np.linalg.eigvalsh(cov)[0] < MIN_EIGENVALUE:
        cov = cov + RIDGE * np.trace(cov) / dim * np.eye(dim)
    if np.linalg.eigvalsh(cov)[0] <= 0:
        raise ClassifierError("covariance is singular even after ridge regularisation (constant features?)")
    return cov


def _class_stats(z, labels):
    z = np.atleast_2d(np.asarray(z, dtype=float))
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (z.shape[0],):
        raise ClassifierError("one label per feature row is required")
    classes = np.arange(labels.max() + 1)
    counts = np.array([np.sum(labels == g) for g in classes])
    if np.any(counts == 0):
        raise ClassifierError(f"classes without training points: {classes[counts == 0].tolist()}")
    means = np.array([z[labels == g].mean(axis=0) for g in classes])
    return z, labels, classes, counts, means


def lda_fit(z, labels) -> GaussianClassifier:
    z, labels, classes, counts, means = _class_stats(z, labels)
    resid = z - means[labels]
    dof = max(1, z.shape[0] - classes.size)
    pooled = _regularize(resid.T @ resid / dof)
    covs = np.repeat(pooled[None], classes.size, axis=0)
    return GaussianClassifier("lda", means, covs, counts / counts.sum())


def qda_fit(z, labels) -> GaussianClassifier:
    z, labels, classes, counts, means = _class_stats(z, labels)
    if np.any(counts < 2):
        raise ClassifierError("QDA needs at least two training points per class")
    covs = []
    for g in classes:
        resid = z[labels == g] - means[g]
        covs.append(_regularize(resid.T @ resid / (counts[g] - 1)))
    return GaussianClassifier("qda", means, np.array(covs), counts / counts.sum())


def fit_classifier(kind: str, z, labels) -> GaussianClassifier:
    if kind == "lda":
        return lda_fit(z, labels)
    if kind == "qda":
        return qda_fit(z, labels)
    raise ClassifierError(f"unknown classifier {kind!r}; expected lda or qda")


def classify(model: GaussianClassifier, z) -> np.ndarray:
    """Class with the largest discriminant score; ties go to the lower index."""
    return np.argmax(model.scores(z), axis=1)


def dd_classify(
    train: LabeledSample,
    test_points,
    metric: MetricDescriptor,
    method: str = "spatial",
    classifier: str = "lda",
) -> np.ndarray:
    """Fit on the training depth features and predict labels for ``test_points``."""
    z_train = depth_features(train, train.points, metric, method)
    model = fit_classifier(classifier, z_train, train.labels)
    return classify(model, depth_features(train, test_points, metric, method))
