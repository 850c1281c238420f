"""Small dense linear algebra and a splittable deterministic PRNG.

Every matrix handled by this package is tiny (at most 64 per side), so the
kernels here favour exactness of contract over speed.  Matrices are plain
2-d float ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGram, NumericalFailure, UsageError

__all__ = [
    "Rng",
    "SvdResult",
    "det",
    "gram_det_sqrt",
    "svd_small",
    "sample_unit_vector",
    "sample_stiefel",
]

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# Relative size below which a Cholesky pivot counts as zero.
GRAM_PIVOT_TOL = 1e-12


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Rng:
    """Counter-based splittable generator (SplitMix64 finaliser over a key).

    Output ``c`` of a stream is ``mix(key + c * gamma)``, so a stream is fully
    described by ``(key, counter)`` and is bit-identical on every platform.
    ``split`` derives an independent child key from a path of integers,
    which is how fuzz trials get their own sub-streams.
    """

    __slots__ = ("seed", "_key", "_counter")

    def __init__(self, seed: int, _key: int | None = None):
        self.seed = int(seed) & _MASK
        self._key = _mix64(self.seed ^ 0x5851F42D4C957F2D) if _key is None else _key
        self._counter = 0

    def __repr__(self):
        return f"Rng(seed={self.seed}, key={self._key:#018x}, counter={self._counter})"

    def split(self, *path: int) -> "Rng":
        key = self._key
        for p in path:
            key = _mix64(key ^ _mix64(((int(p) + 1) * _GAMMA) & _MASK))
        return Rng(self.seed, _key=key)

    def clone(self) -> "Rng":
        other = Rng(self.seed, _key=self._key)
        other._counter = self._counter
        return other

    @property
    def key(self) -> int:
        return self._key

    def next_u64(self) -> int:
        self._counter += 1
        return _mix64((self._key + self._counter * _GAMMA) & _MASK)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_array(self, size: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        return np.array([low + (high - low) * self.uniform() for _ in range(size)])

    def normal_array(self, size: int) -> np.ndarray:
        """Standard normals by Box-Muller, two per pair of uniforms."""
        out = np.empty(size)
        i = 0
        while i < size:
            u1 = 1.0 - self.uniform()  # (0, 1]
            u2 = self.uniform()
            r = math.sqrt(-2.0 * math.log(u1))
            out[i] = r * math.cos(2.0 * math.pi * u2)
            if i + 1 < size:
                out[i + 1] = r * math.sin(2.0 * math.pi * u2)
            i += 2
        return out

    def normal(self) -> float:
        return float(self.normal_array(1)[0])

    def integers(self, high: int) -> int:
        """Unbiased integer in [0, high)."""
        if high <= 0:
            raise UsageError("high must be positive")
        limit = (1 << 64) - ((1 << 64) % high)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % high

    def permutation(self, n: int) -> list[int]:
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integers(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def _as_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise UsageError(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise UsageError("matrix has non-finite entries")
    return A


def det(M) -> float:
    """Determinant by LU factorisation with partial pivoting."""
    A = _as_matrix(M)
    n, m = A.shape
    if n != m:
        raise UsageError(f"det needs a square matrix, got {n}x{m}")
    sign = 1.0
    acc = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if A[piv, col] == 0.0:
            return 0.0
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            sign = -sign
        acc *= A[col, col]
        if col + 1 < n:
            factors = A[col + 1:, col] / A[col, col]
            A[col + 1:, col:] -= np.outer(factors, A[col, col:])
    return sign * acc


def gram_det_sqrt(G) -> float:
    """Square root of the determinant of a Gram matrix.

    Uses a symmetric-pivoted Cholesky elimination.  A pivot in
    ``[-GRAM_PIVOT_TOL * max(diag), 0]`` is roundoff around a linear
    dependence and makes the result 0; anything more negative means the
    input is not positive semidefinite and raises :class:`InvalidGram`.
    Tiny positive pivots are kept, so small volumes are not flushed to zero.
    """
    A = _as_matrix(G)
    n, m = A.shape
    if n != m:
        raise UsageError(f"Gram matrix must be square, got {n}x{m}")
    scale = float(np.max(np.abs(np.diag(A)))) if n else 0.0
    if np.max(np.abs(A - A.T)) > 1e-12 * max(1.0, scale):
        raise UsageError("Gram matrix is not symmetric")
    if scale == 0.0:
        if np.any(A != 0.0):
            raise InvalidGram("zero diagonal with nonzero off-diagonal entries")
        return 0.0
    # plain lists are much faster than numpy for these sizes
    a = A.tolist()
    idx = list(range(n))
    prod = 1.0
    for k in range(n):
        p = max(range(k, n), key=lambda r: a[idx[r]][idx[r]])
        idx[k], idx[p] = idx[p], idx[k]
        r = idx[k]
        pivot = a[r][r]
        if pivot < -GRAM_PIVOT_TOL * scale:
            raise InvalidGram(f"negative pivot {pivot!r} (scale {scale!r})")
        if pivot <= 0.0:
            # clamped pivot makes the whole product zero
            return 0.0
        prod *= pivot
        row = a[r]
        for i in range(k + 1, n):
            ri = idx[i]
            f = a[ri][r] / pivot
            if f == 0.0:
                continue
            rowi = a[ri]
            for j in range(k + 1, n):
                rj = idx[j]
                rowi[rj] -= f * row[rj]
    return math.sqrt(prod)


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``M = left @ diag(singular_values) @ right.T``."""

    singular_values: np.ndarray
    left_factors: np.ndarray
    right_factors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_factors * self.singular_values) @ self.right_factors.T


def _complete_columns(U: np.ndarray, bad: list[int]) -> None:
    """Replace columns ``bad`` of ``U`` by unit vectors orthogonal to the rest."""
    m = U.shape[0]
    good = [j for j in range(U.shape[1]) if j not in bad]
    basis = [U[:, j] for j in good]
    for j in bad:
        best, best_norm = None, 0.0
        for e in range(m):
            v = np.zeros(m)
            v[e] = 1.0
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            nv = float(np.linalg.norm(v))
            if nv > best_norm:
                best, best_norm = v, nv
        if best is None or best_norm < 1e-8:  # pragma: no cover
            raise NumericalFailure("could not complete orthonormal basis")
        v = best / best_norm
        U[:, j] = v
        basis.append(v)


def svd_small(M, max_sweeps: int = 60, tol: float = 1e-14) -> SvdResult:
    """One-sided (Hestenes) Jacobi SVD for matrices with min side at most 64."""
    A = _as_matrix(M)
    transposed = A.shape[0] < A.shape[1]
    if transposed:
        A = A.T.copy()
    m, n = A.shape
    if n > 64:
        raise UsageError("svd_small supports min(rows, cols) <= 64")
    U = A
    V = np.eye(n)
    # columns below this are roundoff noise: rotating them never converges
    negligible = (np.finfo(float).eps * float(np.linalg.norm(A))) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ui, uj = U[:, i], U[:, j]
                alpha = float(ui @ ui)
                beta = float(uj @ uj)
                gamma = float(ui @ uj)
                if min(alpha, beta) <= negligible or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                ui_old = ui.copy()
                U[:, i] = c * ui_old - s * uj
                U[:, j] = s * ui_old + c * uj
                vi_old = V[:, i].copy()
                V[:, i] = c * vi_old - s * V[:, j]
                V[:, j] = s * vi_old + c * V[:, j]
        if not rotated:
            break
    else:
        raise NumericalFailure(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    sigma = np.linalg.norm(U, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    U = U[:, order]
    V = V[:, order]
    cutoff = max(m, n) * np.finfo(float).eps * (sigma[0] if n else 0.0)
    bad = [j for j in range(n) if sigma[j] <= cutoff]
    for j in range(n):
        if j not in bad:
            U[:, j] /= sigma[j]
    if bad:
        _complete_columns(U, bad)
    if transposed:
        return SvdResult(sigma, V, U)
    return SvdResult(sigma, U, V)


def sample_unit_vector(rng: Rng, dim: int) -> np.ndarray:
    if dim < 1:
        raise UsageError("dim must be >= 1")
    while True:
        v = rng.normal_array(dim)
        nv = float(np.linalg.norm(v))
        if nv > 1e-150:
            return v / nv


def _orthonormalize(G: np.ndarray) -> np.ndarray | None:
    Q = G.copy()
    m, k = Q.shape
    for j in range(k):
        v = Q[:, j]
        n0 = np.linalg.norm(v)
        for _ in range(2):  # re-orthogonalisation pass
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        nv = np.linalg.norm(v)
        if n0 == 0.0 or nv <= 1e-8 * n0:
            return None
        Q[:, j] = v / nv
    return Q


def sample_stiefel(rng: Rng, k: int, m: int) -> np.ndarray:
    """Random ``m x k`` matrix with orthonormal columns."""
    if not 1 <= k <= m:
        raise UsageError(f"need 1 <= k <= m, got k={k}, m={m}")
    for _ in range(8):
        Q = _orthonormalize(rng.normal_array(m * k).reshape(m, k))
        if Q is not None:
            return Q
    raise NumericalFailure("rank-deficient Gaussian sample eight times in a row")
