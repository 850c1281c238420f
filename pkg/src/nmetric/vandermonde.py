"""Vandermonde n-metrics and their generalisation through symmetric tensors.

The basic metric on the complex plane is the modulus of the Vandermonde
determinant, ``prod_{i<j} |z_i - z_j|``.  It lifts to R^k componentwise and
to functions on a discrete measure space through monotone norms.

In higher dimensions the naive product of distances ``prod ||x_i - x_j||``
is *not* a pseudo n-metric (see :func:`norm_product`).  What does work is
feeding the ``M_n = n(n-1)/2`` differences ``x_i - x_j`` into a symmetric
``M_n``-linear map ``A`` and taking a norm of the result.
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .axioms import MetricEvaluator
from .errors import CapacityError, UsageError
from .linalg import Rng

__all__ = [
    "EqualityFamilyParams",
    "DiscreteMeasureSpace",
    "SymmetricTensorMap",
    "vandermonde_value",
    "d_vandermonde",
    "equality_family",
    "equality_residual",
    "weighted_simplicial_margin",
    "lift_componentwise",
    "d_lp_discrete",
    "tensor_apply",
    "generalized_vandermonde",
    "expansion_rhs",
    "sum_equality_margin",
    "d_generalized",
    "norm_product",
    "permutations_with_sign",
]

EXPANSION_MAX_N = 8


def _complex_tuple(z: Sequence[complex]) -> list[complex]:
    zs = [complex(v) for v in z]
    if len(zs) < 2:
        raise UsageError("need at least two numbers")
    if not all(cmath.isfinite(v) for v in zs):
        raise UsageError("entries must be finite")
    return zs


def vandermonde_value(z: Sequence[complex]) -> complex:
    """``prod_{i<j} (z_i - z_j)``, the Vandermonde determinant."""
    zs = _complex_tuple(z)
    out = 1 + 0j
    for i, j in itertools.combinations(range(len(zs)), 2):
        out *= zs[i] - zs[j]
    return out


def d_vandermonde(z: Sequence[complex]) -> float:
    zs = _complex_tuple(z)
    out = 1.0
    for i, j in itertools.combinations(range(len(zs)), 2):
        out *= abs(zs[i] - zs[j])
    return out


@dataclass(frozen=True)
class EqualityFamilyParams:
    q: float
    s: float

    def __post_init__(self):
        if not (self.q > 0 and self.s > 0) or not (math.isfinite(self.q) and math.isfinite(self.s)):
            raise UsageError(f"q and s must be positive and finite, got q={self.q}, s={self.s}")


def equality_family(p: EqualityFamilyParams) -> tuple[complex, complex, complex, complex]:
    """Quadruple ``(y, z1, z2, z3)`` for which the 3-point simplicial inequality is tight.

    Normalised so that ``y = 0`` and ``z1 = 1``; ``(q, s) = (1, 2)`` gives
    the third roots of unity.
    """
    q, s = p.q, p.s
    z2 = complex(-1.0, math.sqrt(q * (1.0 + s))) / s
    z3 = complex(-1.0, -math.sqrt((1.0 + s) / q)) / s
    return 0j, 1 + 0j, z2, z3


def equality_residual(y: complex, z1: complex, z2: complex, z3: complex) -> float:
    """Relative gap ``|d(z) - sum d(z with y)| / max(1, d(z), sum)``."""
    lhs = d_vandermonde([z1, z2, z3])
    rhs = d_vandermonde([y, z2, z3]) + d_vandermonde([z1, y, z3]) + d_vandermonde([z1, z2, y])
    return abs(lhs - rhs) / max(1.0, lhs, rhs)


def weighted_simplicial_margin(z: Sequence[complex], y: complex, k: int) -> float:
    """``sum_i |z_i|^k d_V(z with y at i) - |y|^k d_V(z)``; nonnegative for 0 <= k < n."""
    zs = _complex_tuple(z)
    n = len(zs)
    if not 0 <= k <= n - 1:
        raise UsageError(f"k must lie in [0, {n - 1}], got {k}")
    y = complex(y)
    lhs = abs(y) ** k * d_vandermonde(zs)
    rhs = sum(abs(zs[i]) ** k * d_vandermonde(zs[:i] + [y] + zs[i + 1:]) for i in range(n))
    return rhs - lhs


def _p_norm(values: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(values))) if values.size else 0.0
    return float(np.sum(np.abs(values) ** p) ** (1.0 / p))


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise UsageError(f"norm exponent must be >= 1 (or inf), got {p}")
    return p


def lift_componentwise(n: int, k: int, p: float = 2.0) -> MetricEvaluator:
    """Pseudo n-metric on R^k: the p-norm of the per-coordinate Vandermonde metrics."""
    if n < 2 or k < 1:
        raise UsageError("need n >= 2 and k >= 1")
    p = _check_p(p)

    def evaluate(points):
        X = np.asarray(points, dtype=float).reshape(n, k)
        comps = np.ones(k)
        for i, j in itertools.combinations(range(n), 2):
            comps *= np.abs(X[i] - X[j])
        return _p_norm(comps, p)

    return MetricEvaluator(n, evaluate, f"lift(n={n},k={k},p={p:g})")


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    """Finite measure space given by positive atom weights.

    For atomic measures every function is bounded, so the integrability
    constraint needed on general measure spaces holds automatically.
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if not w or not all(v > 0 and math.isfinite(v) for v in w):
            raise UsageError("weights must be a non-empty list of positive finite numbers")
        object.__setattr__(self, "weights", w)

    @property
    def atoms(self) -> int:
        return len(self.weights)


def d_lp_discrete(samples: Sequence[Sequence[float]], space: DiscreteMeasureSpace, p: float = 1.0) -> float:
    """``(sum_j mu_j prod_{i<l} |f_i(j) - f_l(j)|^p)^(1/p)``."""
    p = _check_p(p)
    F = np.asarray(samples, dtype=float)
    if F.ndim != 2 or F.shape[1] != space.atoms:
        raise UsageError(f"each sample must have {space.atoms} atom values, got shape {F.shape}")
    n = F.shape[0]
    if n < 2:
        raise UsageError("need at least two functions")
    pointwise = np.ones(space.atoms)
    for i, j in itertools.combinations(range(n), 2):
        pointwise *= np.abs(F[i] - F[j])
    if p == math.inf:
        return float(np.max(pointwise))
    w = np.asarray(space.weights)
    return float(np.sum(w * pointwise ** p) ** (1.0 / p))


def lp_discrete_metric(n: int, space: DiscreteMeasureSpace, p: float = 1.0) -> MetricEvaluator:
    return MetricEvaluator(
        n, lambda fs: d_lp_discrete(fs, space, p), f"lp-discrete(n={n},J={space.atoms},p={p:g})"
    )


# --------------------------------------------------------------------------
# symmetric multilinear maps


def _monomials(dx: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of length ``dx`` summing to ``degree``, lexicographic."""
    out = []
    for combo in itertools.combinations_with_replacement(range(dx), degree):
        c = Counter(combo)
        out.append(tuple(c.get(i, 0) for i in range(dx)))
    return out


def _multiset_to_exponent(multiset: Sequence[int], dx: int) -> tuple[int, ...]:
    exp = [0] * dx
    for i in multiset:
        if not 0 <= i < dx:
            raise UsageError(f"input index {i} out of range for dx={dx}")
        exp[i] += 1
    return tuple(exp)


class SymmetricTensorMap:
    """Symmetric ``M``-linear map ``(R^dx)^M -> R^dy`` with ``M = n(n-1)/2``.

    One coefficient is stored per (output index, multiset of ``M`` input
    indices).  The map is

        A(v_1, ..., v_M)_o = sum_{i_1..i_M} c[o, {i_1..i_M}] * prod_r v_r[i_r],

    i.e. the coefficient of the multiset is shared by all index tuples that
    sort to it, which makes ``A`` symmetric by construction.  Evaluation
    expands ``prod_r (sum_i v_r[i] t_i)`` as a polynomial in ``t``; the
    coefficient of ``t^alpha`` is exactly the symmetrised product for the
    multiset ``alpha``.
    """

    def __init__(self, n: int, dx: int, dy: int, coeffs: dict | None = None):
        if n < 2 or dx < 1 or dy < 1:
            raise UsageError(f"need n >= 2, dx >= 1, dy >= 1; got n={n}, dx={dx}, dy={dy}")
        self.n = n
        self.dx = dx
        self.dy = dy
        self.order = n * (n - 1) // 2
        self.monomials = _monomials(dx, self.order)
        self._index = {m: i for i, m in enumerate(self.monomials)}
        self.coeffs = np.zeros((dy, len(self.monomials)))
        for (out, multiset), value in (coeffs or {}).items():
            self[out, multiset] = value

    def __setitem__(self, key, value):
        out, multiset = key
        if len(multiset) != self.order:
            raise UsageError(f"multiset must have {self.order} entries, got {len(multiset)}")
        if not 0 <= out < self.dy:
            raise UsageError(f"output index {out} out of range for dy={self.dy}")
        self.coeffs[out, self._index[_multiset_to_exponent(multiset, self.dx)]] = float(value)

    def __getitem__(self, key) -> float:
        out, multiset = key
        return float(self.coeffs[out, self._index[_multiset_to_exponent(multiset, self.dx)]])

    def __repr__(self):
        return f"SymmetricTensorMap(n={self.n}, dx={self.dx}, dy={self.dy})"

    def multisets(self) -> Iterator[tuple[int, ...]]:
        for exp in self.monomials:
            yield tuple(i for i, e in enumerate(exp) for _ in range(e))

    # named constructors

    @classmethod
    def real_product(cls, n: int) -> "SymmetricTensorMap":
        """Multiplication of ``M`` real numbers."""
        A = cls(n, 1, 1)
        A.coeffs[0, 0] = 1.0
        return A

    @classmethod
    def complex_product(cls, n: int) -> "SymmetricTensorMap":
        """Multiplication of ``M`` complex numbers stored as (re, im) pairs.

        A multiset with ``r`` imaginary slots contributes ``i^r``.
        """
        A = cls(n, 2, 2)
        for col, (n_re, n_im) in enumerate(A.monomials):
            phase = 1j ** n_im
            A.coeffs[0, col] = round(phase.real)
            A.coeffs[1, col] = round(phase.imag)
        return A

    @classmethod
    def identity(cls, dx: int) -> "SymmetricTensorMap":
        """The linear (n = 2) identity map on R^dx."""
        A = cls(2, dx, dx)
        for o in range(dx):
            A[o, (o,)] = 1.0
        return A

    @classmethod
    def random(cls, n: int, dx: int, dy: int, rng: Rng) -> "SymmetricTensorMap":
        A = cls(n, dx, dy)
        A.coeffs = rng.normal_array(A.coeffs.size).reshape(A.coeffs.shape)
        return A

    # serialisation: multisets use 1-based input indices

    def to_dict(self) -> dict:
        entries = []
        for col, ms in enumerate(self.multisets()):
            for out in range(self.dy):
                v = float(self.coeffs[out, col])
                if v != 0.0:
                    entries.append({"out": out, "multiset": [i + 1 for i in ms], "value": v})
        return {"n": self.n, "dx": self.dx, "dy": self.dy, "coeffs": entries}

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetricTensorMap":
        try:
            A = cls(int(d["n"]), int(d["dx"]), int(d["dy"]))
            for e in d["coeffs"]:
                A[int(e["out"]), [int(i) - 1 for i in e["multiset"]]] = float(e["value"])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed tensor description: {exc}") from exc
        return A


def _poly_mul_linear(poly: dict, v: np.ndarray) -> dict:
    out: dict = {}
    for exp, c in poly.items():
        for i, vi in enumerate(v):
            if vi == 0.0:
                continue
            e = list(exp)
            e[i] += 1
            e = tuple(e)
            out[e] = out.get(e, 0.0) + c * vi
    return out


def tensor_apply(A: SymmetricTensorMap, args: Sequence, counts: Sequence[int] | None = None) -> np.ndarray:
    """Evaluate ``A`` on ``args``; ``counts[r]`` repeats ``args[r]`` that many times."""
    vecs = [np.asarray(a, dtype=float).reshape(-1) for a in args]
    counts = [1] * len(vecs) if counts is None else [int(c) for c in counts]
    if len(counts) != len(vecs) or any(c < 0 for c in counts):
        raise UsageError("counts must be nonnegative and match args")
    if sum(counts) != A.order:
        raise UsageError(f"expected {A.order} arguments, got {sum(counts)}")
    for v in vecs:
        if v.shape != (A.dx,):
            raise UsageError(f"arguments must have dimension {A.dx}, got {v.shape}")
    poly = {(0,) * A.dx: 1.0}
    for v, c in zip(vecs, counts):
        for _ in range(c):
            poly = _poly_mul_linear(poly, v)
    sym = np.zeros(len(A.monomials))
    for exp, c in poly.items():
        sym[A._index[exp]] = c
    return A.coeffs @ sym


def _points(x, dx: int) -> list[np.ndarray]:
    pts = [np.asarray(p, dtype=float).reshape(-1) for p in x]
    for p in pts:
        if p.shape != (dx,):
            raise UsageError(f"points must have dimension {dx}, got {p.shape}")
    return pts


def generalized_vandermonde(A: SymmetricTensorMap, x: Sequence) -> np.ndarray:
    """``A(prod_{j<i} (x_i - x_j))``."""
    if len(x) != A.n:
        raise UsageError(f"tensor built for n={A.n}, got {len(x)} points")
    pts = _points(x, A.dx)
    diffs = [pts[i] - pts[j] for i in range(A.n) for j in range(i)]
    return tensor_apply(A, diffs)


def permutations_with_sign(n: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Permutations of ``range(n)`` in lexicographic order with their signs.

    The sign is updated incrementally: each next-permutation step is one
    swap followed by reversing a suffix of length ``L``, and that reversal
    has sign ``(-1)^(L(L-1)/2)``.
    """
    perm = list(range(n))
    sign = 1
    while True:
        yield tuple(perm), sign
        i = n - 2
        while i >= 0 and perm[i] >= perm[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while perm[j] <= perm[i]:
            j -= 1
        perm[i], perm[j] = perm[j], perm[i]
        perm[i + 1:] = reversed(perm[i + 1:])
        length = n - i - 1
        if (1 + length * (length - 1) // 2) % 2:
            sign = -sign


def expansion_rhs(A: SymmetricTensorMap, x: Sequence) -> np.ndarray:
    """``sum_pi sign(pi) A(prod_j x_j^(pi(j)-1))``, the determinant-style expansion."""
    n = len(x)
    if n != A.n:
        raise UsageError(f"tensor built for n={A.n}, got {n} points")
    if n > EXPANSION_MAX_N:
        raise CapacityError(f"expansion enumerates n! terms; n={n} exceeds {EXPANSION_MAX_N}")
    pts = _points(x, A.dx)
    total = np.zeros(A.dy)
    for perm, sign in permutations_with_sign(n):
        # perm[j] is pi(j) - 1, the power of x_j
        total += sign * tensor_apply(A, pts, perm)
    return total


def sum_equality_margin(A: SymmetricTensorMap, x: Sequence, xi) -> float:
    """``||V(x) - sum_i V(x with xi at slot i)||_2``; zero up to roundoff."""
    pts = _points(x, A.dx)
    xi = _points([xi], A.dx)[0]
    total = np.zeros(A.dy)
    for i in range(len(pts)):
        total += generalized_vandermonde(A, pts[:i] + [xi] + pts[i + 1:])
    return float(np.linalg.norm(generalized_vandermonde(A, pts) - total))


def d_generalized(A: SymmetricTensorMap, p: float, x: Sequence) -> float:
    return _p_norm(generalized_vandermonde(A, x), _check_p(p))


def generalized_metric(A: SymmetricTensorMap, p: float = 2.0) -> MetricEvaluator:
    _check_p(p)
    return MetricEvaluator(
        A.n, lambda x: d_generalized(A, p, x), f"generalized(n={A.n},dx={A.dx},dy={A.dy},p={p:g})"
    )


def vandermonde_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, d_vandermonde, f"vandermonde(n={n})")


def norm_product(points: Sequence) -> float:
    """``prod_{i<j} ||x_i - x_j||``: a tempting candidate that fails the simplicial inequality in R^3."""
    pts = [np.asarray(p, dtype=float) for p in points]
    out = 1.0
    for i, j in itertools.combinations(range(len(pts)), 2):
        out *= float(np.linalg.norm(pts[i] - pts[j]))
    return out


def norm_product_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(n, norm_product, f"norm-product(n={n})")


def tetrahedron() -> list[np.ndarray]:
    """Vertices of a regular tetrahedron inscribed in the unit sphere."""
    r2, r6 = math.sqrt(2.0), math.sqrt(6.0)
    return [
        np.array([1.0, 0.0, 0.0]),
        np.array([-1.0, 2.0 * r2, 0.0]) / 3.0,
        np.array([-1.0, -r2, r6]) / 3.0,
        np.array([-1.0, -r2, -r6]) / 3.0,
    ]
