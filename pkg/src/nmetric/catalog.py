"""Registry of named metrics with matching point samplers and JSON point codecs.

Each entry knows how to build the evaluator for given sizes, how to draw
random points for fuzzing, and how to parse points from the JSON input of
``nmetric eval``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import exterior, manifolds, vandermonde
from .axioms import DEFAULT_TOL, SVD_TOL, MetricEvaluator, PointSampler
from .errors import UsageError
from .linalg import Rng, sample_stiefel, sample_unit_vector

__all__ = [
    "MetricSpec",
    "Sizes",
    "METRICS",
    "build",
    "parse_points",
    "parse_frame",
    "frame_to_dict",
    "points_to_dict",
    "complex_from_json",
]


@dataclass(frozen=True)
class Sizes:
    n: int = 3
    dim: int = 3
    k: int = 2
    m: int = 4
    p: float = 2.0
    seed: int = 0


@dataclass(frozen=True)
class MetricSpec:
    name: str
    kind: str  # "complex", "vector", "unit", "frame", "function"
    tol: float
    experimental: bool
    make: Callable[[Sizes], MetricEvaluator]
    draw: Callable[[Sizes], Callable[[Rng], Any]] | None
    fixed_n: int | None = None
    note: str = ""
    sampler: Callable[[Sizes], PointSampler] | None = None


# ---------------------------------------------------------------------------
# JSON codecs


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(float(v[0]), float(v[1]))
    raise UsageError(f"expected a number or an [re, im] pair, got {v!r}")


def frame_to_dict(A) -> dict:
    A = np.asarray(A, dtype=float)
    return {"k": A.shape[1], "m": A.shape[0], "columns": A.T.tolist()}


def parse_frame(d: dict) -> np.ndarray:
    try:
        k, m = int(d["k"]), int(d["m"])
        cols = np.asarray(d["columns"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed frame: {exc}") from exc
    if cols.shape != (k, m):
        raise UsageError(f"frame declares k={k}, m={m} but has columns of shape {cols.shape}")
    return cols.T


def points_to_dict(points, kind: str = "vector") -> dict:
    if kind == "complex":
        return {"dim": 1, "points": [[complex(z).real, complex(z).imag] for z in points]}
    if kind == "frame":
        return {"frames": [frame_to_dict(A) for A in points]}
    arr = np.asarray(points, dtype=float)
    return {"dim": int(arr.shape[1]), "points": arr.tolist()}


def parse_points(doc: Any, kind: str) -> list:
    """Decode the ``points`` (or ``frames``) of an input document."""
    if not isinstance(doc, dict):
        raise UsageError("input must be a JSON object")
    if kind == "frame":
        if "frames" not in doc or not isinstance(doc["frames"], list):
            raise UsageError('frame input needs a "frames" list')
        return [parse_frame(f) for f in doc["frames"]]
    if "points" not in doc or not isinstance(doc["points"], list):
        raise UsageError('input needs a "points" list')
    raw = doc["points"]
    if kind == "complex":
        return [complex_from_json(v) for v in raw]
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"points must be numeric: {exc}") from exc
    if arr.ndim != 2:
        raise UsageError(f"points must be a list of equal-length vectors, got shape {arr.shape}")
    if "dim" in doc and int(doc["dim"]) != arr.shape[1]:
        raise UsageError(f"declared dim {doc['dim']} does not match vectors of length {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("points must be finite")
    return list(arr)


# ---------------------------------------------------------------------------
# samplers

# fixed sub-stream ids, kept apart from the per-trial streams
_TENSOR_STREAM = 1 << 40
_SEARCH_STREAM = (1 << 40) + 1


def _complex(_: Sizes):
    def draw(rng: Rng) -> complex:
        a, b = rng.normal_array(2)
        return complex(a, b)

    return draw


def _gauss(attr: str = "dim"):
    def factory(s: Sizes):
        size = getattr(s, attr)
        return lambda rng: rng.normal_array(size)

    return factory


def _unit(s: Sizes):
    return lambda rng: sample_unit_vector(rng, s.dim)


def _frame(s: Sizes):
    if s.k > s.m:
        raise UsageError(f"frames need k <= m, got k={s.k}, m={s.m}")
    return lambda rng: sample_stiefel(rng, s.k, s.m)


def _regular_simplex(n: int, dim: int) -> np.ndarray:
    """``n`` unit vectors in R^dim with equal pairwise distances (needs dim >= n - 1)."""
    E = np.eye(n) - 1.0 / n
    Q, _ = np.linalg.qr(E[:, : n - 1])
    V = E @ Q
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    out = np.zeros((n, dim))
    out[:, : n - 1] = V
    return out


def _near_regular(s: Sizes, jitter: float = 0.05) -> PointSampler:
    """Tuples near a randomly rotated regular simplex, with ``y`` near its centre.

    Generic samples almost never break the simplicial inequality for the
    pairwise norm product; this is the region where it fails.
    """
    if s.dim < s.n - 1:
        raise UsageError(f"near-regular sampling needs dim >= n - 1, got dim={s.dim}, n={s.n}")
    base = _regular_simplex(s.n, s.dim)

    def sample(seed: int, index: int) -> np.ndarray:
        rot = sample_stiefel(Rng(seed).split(0), s.dim, s.dim)
        noise = jitter * Rng(seed).split(index + 1).normal_array(s.dim)
        centre = base[index] if index < s.n else np.zeros(s.dim)
        return rot @ centre + noise

    return PointSampler(sample, f"near-regular simplex in R^{s.dim}, y near the centre")


def _space(s: Sizes) -> vandermonde.DiscreteMeasureSpace:
    return vandermonde.DiscreteMeasureSpace(tuple((j + 1) / s.dim for j in range(s.dim)))


def _tensor(s: Sizes) -> vandermonde.SymmetricTensorMap:
    return vandermonde.SymmetricTensorMap.random(s.n, s.dim, 2, Rng(s.seed).split(_TENSOR_STREAM))


METRICS: dict[str, MetricSpec] = {
    spec.name: spec
    for spec in [
        MetricSpec("vandermonde", "complex", DEFAULT_TOL, False,
                   lambda s: vandermonde.vandermonde_metric(s.n), _complex),
        MetricSpec("lift", "vector", DEFAULT_TOL, False,
                   lambda s: vandermonde.lift_componentwise(s.n, s.dim, s.p), _gauss()),
        MetricSpec("lp-discrete", "function", DEFAULT_TOL, False,
                   lambda s: vandermonde.lp_discrete_metric(s.n, _space(s), s.p), _gauss()),
        MetricSpec("gen-vandermonde", "vector", DEFAULT_TOL, False,
                   lambda s: vandermonde.generalized_metric(_tensor(s), s.p), _gauss(),
                   note="random symmetric tensor drawn from --seed"),
        MetricSpec("norm-product", "vector", DEFAULT_TOL, False,
                   lambda s: vandermonde.norm_product_metric(s.n), None,
                   note="not a pseudo n-metric for dim >= 3; expected to fail",
                   sampler=_near_regular),
        MetricSpec("simplex", "vector", DEFAULT_TOL, False,
                   lambda s: exterior.simplex_metric(s.n), _gauss()),
        MetricSpec("sphere", "unit", DEFAULT_TOL, False,
                   lambda s: manifolds.sphere_metric(s.n), _unit),
        MetricSpec("stiefel", "frame", DEFAULT_TOL, False,
                   lambda s: manifolds.stiefel_metric(s.n), _frame),
        MetricSpec("grassmann-proj", "frame", DEFAULT_TOL, False,
                   lambda s: manifolds.grassmann_proj_metric(s.n), _frame),
        MetricSpec("grassmann-quotient", "frame", SVD_TOL, False,
                   lambda s: manifolds.grassmann_quotient_metric(), _frame, fixed_n=2),
        MetricSpec("grassmann-classical", "frame", SVD_TOL, False,
                   lambda s: manifolds.grassmann_classical_metric(), _frame, fixed_n=2),
        MetricSpec("grassmann-quotient-n3", "frame", SVD_TOL, True,
                   lambda s: MetricEvaluator(
                       3, lambda f: manifolds.grassmann_quotient_n(f, Rng(s.seed).split(_SEARCH_STREAM)),
                       "grassmann-quotient-n3 (experimental)"),
                   _frame, fixed_n=3, note="experimental: upper-bound search, not known to be a metric"),
    ]
}


def build(name: str, sizes: Sizes) -> tuple[MetricSpec, MetricEvaluator, PointSampler]:
    if name not in METRICS:
        raise UsageError(f"unknown metric {name!r}; choose from {', '.join(sorted(METRICS))}")
    spec = METRICS[name]
    if spec.fixed_n is not None and sizes.n != spec.fixed_n:
        sizes = Sizes(spec.fixed_n, sizes.dim, sizes.k, sizes.m, sizes.p, sizes.seed)
    if sizes.n < 2 or sizes.dim < 1 or sizes.k < 1 or sizes.m < 1:
        raise UsageError("need n >= 2 and positive dim, k, m")
    if not (sizes.p >= 1.0 or sizes.p == math.inf):
        raise UsageError("p must be >= 1")
    metric = spec.make(sizes)
    if spec.sampler is not None:
        sampler = spec.sampler(sizes)
    else:
        sampler = PointSampler.from_rng(spec.draw(sizes), f"{spec.kind} points for {name}")
    return spec, metric, sampler
