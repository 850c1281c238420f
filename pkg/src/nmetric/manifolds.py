"""Pseudo n-metrics on the unit sphere, the Stiefel manifold and the Grassmannian.

All three come from the same recipe: points on the unit sphere of a Hilbert
space, measured by the square root of the Gram determinant of their
pairwise inner products.

* sphere: unit vectors in R^m with the Euclidean inner product;
* Stiefel: ``m x k`` frames ``A`` with ``A^T A = I`` and the scaled
  Hilbert-Schmidt product ``<A, B> = tr(A^T B) / k``;
* Grassmann: subspaces through their orthogonal projections ``P = A A^T``
  with ``<P, Q> = tr(P Q) / k``.

Subspaces are always passed as frames.  Projections are derived values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .axioms import MetricEvaluator
from .errors import DegenerateInput, NumericalFailure, UsageError
from .exterior import as_tuple, wedge_norm
from .linalg import Rng, sample_stiefel, svd_small

__all__ = [
    "PrincipalAngles",
    "UNIT_TOL",
    "FRAME_TOL",
    "require_unit",
    "renormalize",
    "require_frame",
    "d_sphere",
    "polar_sine",
    "n_sine",
    "hs_inner",
    "d_stiefel",
    "projection_from_frame",
    "projection_inner",
    "d_grassmann_proj",
    "principal_angles",
    "d_grassmann_quotient",
    "d_classical_grassmann_2",
    "optimal_alignment",
    "o2_grid",
    "grassmann_quotient_n",
    "spectral_wedge_estimate",
]

UNIT_TOL = 1e-10
FRAME_TOL = 1e-10
SIGMA_OVERSHOOT = 1e-8


def require_unit(vectors, tol: float = UNIT_TOL) -> np.ndarray:
    X = as_tuple(vectors)
    dev = np.abs(np.linalg.norm(X, axis=1) - 1.0)
    if np.any(dev > tol):
        bad = int(np.argmax(dev))
        raise UsageError(f"vector {bad} is not a unit vector (| |x| - 1 | = {dev[bad]:.3e})")
    return X


def renormalize(vectors) -> np.ndarray:
    """Scale every nonzero vector to unit length; zero vectors are rejected."""
    X = as_tuple(vectors)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0.0):
        raise UsageError("cannot normalise a zero vector")
    return X / norms[:, None]


def require_frame(A, tol: float = FRAME_TOL) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2 or not 1 <= A.shape[1] <= A.shape[0]:
        raise UsageError(f"a frame is an m x k matrix with 1 <= k <= m, got shape {A.shape}")
    err = np.max(np.abs(A.T @ A - np.eye(A.shape[1])))
    if err > tol:
        raise UsageError(f"frame columns are not orthonormal (max |A^T A - I| = {err:.3e})")
    return A


def _frames(frames: Sequence) -> list[np.ndarray]:
    Fs = [require_frame(A) for A in frames]
    if len({F.shape for F in Fs}) > 1:
        raise UsageError(f"frames must share (m, k), got {[F.shape for F in Fs]}")
    return Fs


def _anchored_volume(X: np.ndarray) -> float:
    """``||x_1 ^ (x_2 - x_1) ^ ... ^ (x_n - x_1)||``, equal to ``||x_1 ^ ... ^ x_n||``.

    For nearly coincident unit vectors the plain Gram determinant is
    ``1 - cos^2`` and loses everything below ~1e-8; the differences keep
    small volumes accurate and make repeated points exactly zero.
    """
    Y = np.array(X, dtype=float)
    Y[1:] -= Y[0]
    return wedge_norm(Y)


def d_sphere(vectors) -> float:
    """Gram-determinant volume of unit vectors (the polar sine)."""
    return _anchored_volume(require_unit(vectors))


def polar_sine(vectors) -> float:
    """``||x_1 ^ ... ^ x_n|| / prod ||x_i||``."""
    X = as_tuple(vectors)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0.0):
        raise UsageError("polar sine is undefined for a zero vector")
    # normalising first keeps the Gram matrix well scaled
    return _anchored_volume(X / norms[:, None])


def n_sine(vectors) -> float:
    """``||x_1^..^x_n||^(n-1) / prod_i ||wedge of all but x_i||``."""
    X = as_tuple(vectors)
    n = X.shape[0]
    if n < 2:
        raise UsageError("need at least two vectors")
    subs = [wedge_norm(np.delete(X, i, axis=0)) for i in range(n)]
    if any(s == 0.0 for s in subs):
        raise DegenerateInput("an (n-1)-subtuple is linearly dependent")
    # normalise each factor by the matching sub-volume to avoid overflow
    full = wedge_norm(X)
    out = 1.0
    for s in subs:
        out *= full / s
    return out / full if full else 0.0


def hs_inner(A, B, k: int | None = None) -> float:
    """Scaled Hilbert-Schmidt product ``tr(A^T B) / k`` (``k`` defaults to the column count)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if A.shape != B.shape:
        raise UsageError(f"shape mismatch {A.shape} vs {B.shape}")
    k = A.shape[1] if k is None else k
    if k < 1:
        raise UsageError("scale k must be positive")
    return float(np.sum(A * B)) / k


def _hs_volume(mats: Sequence[np.ndarray], k: int) -> float:
    # Gram determinant under tr(A^T B) / k: flatten and scale by 1/sqrt(k)
    X = np.array([M.reshape(-1) for M in mats]) / math.sqrt(k)
    return _anchored_volume(X)


def d_stiefel(frames: Sequence) -> float:
    """Gram volume of the frames under the scaled Hilbert-Schmidt product."""
    Fs = _frames(frames)
    return _hs_volume(Fs, Fs[0].shape[1])


def projection_from_frame(A) -> np.ndarray:
    A = require_frame(A)
    P = A @ A.T
    return (P + P.T) / 2.0


def projection_inner(P1, P2, k: int) -> float:
    return hs_inner(P1, P2, k)


def d_grassmann_proj(frames: Sequence) -> float:
    Fs = _frames(frames)
    k = Fs[0].shape[1]
    return _hs_volume([projection_from_frame(A) for A in Fs], k)


@dataclass(frozen=True)
class PrincipalAngles:
    """Cosines (nonincreasing), matching sines and angles (nondecreasing)."""

    sigmas: np.ndarray
    thetas: np.ndarray
    sines: np.ndarray

    @property
    def largest(self) -> float:
        return float(self.thetas[-1])


def principal_angles(A1, A2) -> PrincipalAngles:
    """Principal angles from the singular values of ``A1^T A2``.

    Sines come from the residual ``A2 - A1 A1^T A2`` so that small angles,
    where ``1 - cos`` cancels, stay accurate.
    """
    A1, A2 = _frames([A1, A2])
    M = A1.T @ A2
    sigmas = svd_small(M).singular_values
    if sigmas[0] > 1.0 + SIGMA_OVERSHOOT:
        raise NumericalFailure(f"singular value {sigmas[0]!r} exceeds 1; frames not orthonormal?")
    sines = np.clip(svd_small(A2 - A1 @ M).singular_values[::-1], 0.0, 1.0)
    thetas = np.arccos(np.clip(sigmas, 0.0, 1.0))
    return PrincipalAngles(sigmas, thetas, sines)


def d_grassmann_quotient(A1, A2) -> float:
    """``min_Q d_stiefel(A1, A2 Q)`` over orthogonal ``Q``, in closed form."""
    pa = principal_angles(A1, A2)
    k = len(pa.sigmas)
    cos = np.clip(pa.sigmas, 0.0, 1.0)
    c = float(np.sum(cos)) / k
    # 1 - cos = sin^2 / (1 + cos), free of cancellation
    one_minus_c = float(np.sum(pa.sines**2 / (1.0 + cos))) / k
    return math.sqrt(max(0.0, one_minus_c * (1.0 + c)))


def d_classical_grassmann_2(A1, A2) -> float:
    """Sine of the largest principal angle (spectral norm of ``P1 - P2``)."""
    return float(principal_angles(A1, A2).sines[-1])


def optimal_alignment(A1, A2) -> np.ndarray:
    """Orthogonal ``Q`` maximising ``tr(A1^T A2 Q)``, i.e. ``Z Y^T`` from the SVD of ``A1^T A2``."""
    A1, A2 = _frames([A1, A2])
    svd = svd_small(A1.T @ A2)
    return svd.right_factors @ svd.left_factors.T


def o2_grid(points: int = 720) -> list[np.ndarray]:
    """``points / 2`` equally spaced rotations and as many reflections of the plane."""
    if points < 2 or points % 2:
        raise UsageError("grid size must be a positive even number")
    half = points // 2
    out = []
    for i in range(half):
        t = 2.0 * math.pi * i / half
        c, s = math.cos(t), math.sin(t)
        out.append(np.array([[c, -s], [s, c]]))
    for i in range(half):
        t = 2.0 * math.pi * i / half
        c, s = math.cos(t), math.sin(t)
        out.append(np.array([[c, s], [s, -c]]))
    return out


def _orthogonal_candidates(k: int, rng: Rng, count: int) -> list[np.ndarray]:
    if k == 1:
        return [np.array([[1.0]]), np.array([[-1.0]])]
    if k == 2:
        return o2_grid(2 * (count // 2))
    out = [np.eye(k)]
    for _ in range(count - 1):
        Q = sample_stiefel(rng, k, k)
        out.append(Q)
    return out


def grassmann_quotient_n(frames: Sequence, rng: Rng | None = None, candidates: int = 72, rounds: int = 3) -> float:
    """Experimental: ``min_{Q_j} d_stiefel(A_1 Q_1, ..., A_n Q_n)``.

    Exact for ``k = 1`` (all sign patterns).  For ``k >= 2`` a coordinate
    search over a finite set of orthogonal matrices; the result is an upper
    bound on the true minimum.  Not known to be a pseudo n-metric.
    """
    Fs = _frames(frames)
    n = len(Fs)
    k = Fs[0].shape[1]
    # a common right factor cancels, so Q_1 = I
    if k == 1:
        best = math.inf
        for signs in itertools.product((1.0, -1.0), repeat=n - 1):
            aligned = [Fs[0]] + [s * F for s, F in zip(signs, Fs[1:])]
            best = min(best, d_stiefel(aligned))
        return best
    rng = rng or Rng(0)
    cands = _orthogonal_candidates(k, rng, candidates)
    current = list(Fs)
    best = d_stiefel(current)
    for _ in range(rounds):
        improved = False
        for j in range(1, n):
            base = Fs[j]
            for Q in cands:
                trial = current[:j] + [base @ Q] + current[j + 1:]
                v = d_stiefel(trial)
                if v < best - 1e-15:
                    best, current, improved = v, trial, True
        if not improved:
            break
    return best


def spectral_wedge_estimate(frames: Sequence, rng: Rng, samples: int = 200, dual: bool = False) -> float:
    """Experimental lower estimate of ``max_F |det(<P_i, F_j>)| / prod ||F_j||_*``.

    ``||.||_*`` is the spectral norm, or its dual (nuclear norm) when
    ``dual`` is true.  The maximum is approximated by random sampling plus
    the projections themselves as candidates.  No simplicial inequality is
    known for this quantity.
    """
    Fs = _frames(frames)
    n = len(Fs)
    m = Fs[0].shape[0]
    Ps = [projection_from_frame(A) for A in Fs]

    def norm(F):
        s = svd_small(F).singular_values
        return float(np.sum(s)) if dual else float(s[0])

    def ratio(Gs):
        M = np.array([[float(np.sum(P * G)) for G in Gs] for P in Ps])
        denom = math.prod(norm(G) for G in Gs)
        return abs(float(np.linalg.det(M))) / denom if denom else 0.0

    best = ratio(Ps)
    for _ in range(samples):
        Gs = [rng.normal_array(m * m).reshape(m, m) for _ in range(n)]
        best = max(best, ratio(Gs))
    return best


def sphere_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, d_sphere, f"sphere(n={n})")


def stiefel_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, d_stiefel, f"stiefel(n={n})")


def grassmann_proj_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, d_grassmann_proj, f"grassmann-proj(n={n})")


def grassmann_quotient_metric() -> MetricEvaluator:
    return MetricEvaluator(2, lambda f: d_grassmann_quotient(*f), "grassmann-quotient")


def grassmann_classical_metric() -> MetricEvaluator:
    return MetricEvaluator(2, lambda f: d_classical_grassmann_2(*f), "grassmann-classical")

