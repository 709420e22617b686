"""Positive-definite kernels and the feature-space distances they induce.

d^2(x, y) = k(x, x) - 2 k(x, y) + k(y, y)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_GAMMA = 0.933
KERNEL_KINDS = ("gaussian", "rational_quadratic", "linear")

_BLOCK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class KernelDescriptor:
    kind: str = "gaussian"
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.kind == "gaussian" and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gaussian kernel needs gamma > 0, got {self.gamma!r}")

    def __str__(self):
        if self.kind == "gaussian":
            return f"gaussian:{self.gamma:g}"
        return "rq" if self.kind == "rational_quadratic" else "linear"


def parse_kernel(text: str) -> KernelDescriptor:
    """``gaussian[:gamma]``, ``rq`` / ``rational_quadratic`` or ``linear``."""
    name, _, param = text.strip().partition(":")
    name = name.lower()
    if name == "gaussian":
        return KernelDescriptor("gaussian", float(param) if param else DEFAULT_GAMMA)
    if param:
        raise ValueError(f"kernel {name!r} takes no parameter")
    if name in ("rq", "rational_quadratic"):
        return KernelDescriptor("rational_quadratic")
    if name == "linear":
        return KernelDescriptor("linear")
    raise ValueError(f"unknown kernel {name!r}")


def _from_sqdist(sq: np.ndarray, kernel: KernelDescriptor) -> np.ndarray:
    if kernel.kind == "gaussian":
        return np.exp(-kernel.gamma * sq)
    return 1.0 / (1.0 + sq)


def kernel_value(x1, x2, kernel: KernelDescriptor) -> float:
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x1.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x1.shape} vs {x2.shape}")
    if kernel.kind == "linear":
        return float(np.dot(x1, x2))
    return float(_from_sqdist(np.sum((x1 - x2) ** 2), kernel))


def kernel_matrix(x, y, kernel: KernelDescriptor) -> np.ndarray:
    """Gram matrix K[i, j] = k(x_i, y_j)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    out = np.empty((x.shape[0], y.shape[0]))
    step = max(1, _BLOCK_ELEMENTS // max(1, y.shape[0] * x.shape[1]))
    for start in range(0, x.shape[0], step):
        xa = x[start : start + step, None, :]
        if kernel.kind == "linear":
            out[start : start + step] = np.sum(xa * y[None], axis=-1)
        else:
            out[start : start + step] = _from_sqdist(np.sum((xa - y[None]) ** 2, axis=-1), kernel)
    return out


def _self_kernel(x: np.ndarray, kernel: KernelDescriptor) -> np.ndarray:
    if kernel.kind == "linear":
        return np.sum(x * x, axis=1)
    return np.ones(x.shape[0])


def kernel_cross_distances(x, y, kernel: KernelDescriptor) -> np.ndarray:
    """Feature-space distances between rows of ``x`` and rows of ``y``.

    Negative squared distances from rounding are clamped to zero, and rows
    that are coordinate-wise identical get distance exactly zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sq = _self_kernel(x, kernel)[:, None] - 2.0 * kernel_matrix(x, y, kernel) + _self_kernel(y, kernel)[None, :]
    d = np.sqrt(np.maximum(sq, 0.0))
    for i in range(x.shape[0]):
        d[i, np.all(y == x[i], axis=1)] = 0.0
    if x is y:
        d = np.minimum(d, d.T)
    return d


def kernel_distance_matrix(points, kernel: KernelDescriptor) -> np.ndarray:
    x = np.asarray(getattr(points, "data", points), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return kernel_cross_distances(x, x, kernel)
