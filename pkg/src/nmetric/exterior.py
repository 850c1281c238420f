"""Exterior-product norms in Euclidean space and the simplex pseudo n-metric.

The norm of ``x_1 ^ ... ^ x_k`` is the square root of the Gram determinant
(the k-volume of the parallelepiped spanned by the vectors).  It is never
expanded in wedge coordinates, which would need ``C(m, k)`` components.

A tuple of ``k`` vectors in R^m is a ``(k, m)`` array: one vector per row.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .axioms import MetricEvaluator
from .errors import UsageError
from .linalg import det, gram_det_sqrt

__all__ = [
    "as_tuple",
    "gram_matrix",
    "wedge_norm",
    "transform_tuple",
    "det_rule_margin",
    "hadamard_margin",
    "d_simplex",
    "simplex_metric",
    "sine_of_angle",
    "triangle_area_form",
]


def as_tuple(vectors) -> np.ndarray:
    X = np.asarray(vectors, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise UsageError(f"expected k vectors of a common dimension, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise UsageError("vectors must have finite entries")
    return X


def gram_matrix(vectors) -> np.ndarray:
    X = as_tuple(vectors)
    G = X @ X.T
    return (G + G.T) / 2.0


def wedge_norm(vectors) -> float:
    """``||x_1 ^ ... ^ x_k||``; zero when the vectors are linearly dependent."""
    X = as_tuple(vectors)
    k, m = X.shape
    if k > m:
        return 0.0
    return gram_det_sqrt(gram_matrix(X))


def transform_tuple(A, vectors) -> np.ndarray:
    """Recombine a tuple by a square matrix: output vector ``j`` is ``sum_i A[i, j] x_i``."""
    A = np.asarray(A, dtype=float)
    X = as_tuple(vectors)
    if A.shape != (X.shape[0], X.shape[0]):
        raise UsageError(f"matrix must be {X.shape[0]}x{X.shape[0]}, got {A.shape}")
    return A.T @ X


def det_rule_margin(A, vectors) -> float:
    """``| ||A_X x|| - |det A| ||x|| |`` for a tuple of ``n`` vectors; zero up to roundoff."""
    transformed = transform_tuple(A, vectors)
    return abs(wedge_norm(transformed) - abs(det(A)) * wedge_norm(vectors))


def hadamard_margin(vectors, j: int) -> float:
    """``||x_1^..^x_j|| * ||x_{j+1}^..^x_k|| - ||x_1^..^x_k||`` (split after the first ``j``)."""
    X = as_tuple(vectors)
    k = X.shape[0]
    if not 1 <= j <= k - 1:
        raise UsageError(f"split index must be in [1, {k - 1}], got {j}")
    return wedge_norm(X[:j]) * wedge_norm(X[j:]) - wedge_norm(X)


def d_simplex(points) -> float:
    """Volume of the parallelepiped spanned by ``x_i - x_1``, ``i = 2..n``.

    This is ``(n - 1)!`` times the volume of the simplex with vertices
    ``x_1..x_n``.
    """
    X = as_tuple(points)
    if X.shape[0] < 2:
        raise UsageError("need at least two points")
    return wedge_norm(X[1:] - X[0])


def simplex_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, d_simplex, f"simplex(n={n})")


def sine_of_angle(u: Sequence[float], v: Sequence[float]) -> float:
    """``|sin angle(u, v)|`` from the 2x2 Gram determinant, stable near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise UsageError("angle with a zero vector is undefined")
    a, b = u / nu, v / nv
    # |a - b| |a + b| / 2 = |sin| for unit vectors, without cancellation
    return float(np.linalg.norm(a - b) * np.linalg.norm(a + b) / 2.0)


def triangle_area_form(u, v, w) -> float:
    """``||v-u|| ||w-u|| |sin angle(v-u, w-u)|`` for three points."""
    u, v, w = (np.asarray(p, dtype=float) for p in (u, v, w))
    a, b = v - u, w - u
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return na * nb * sine_of_angle(a, b)

