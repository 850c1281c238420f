"""Metric-agnostic checks of the pseudo n-metric axioms.

A pseudo n-metric ``d`` on a set ``X`` is semidefinite (zero whenever two
arguments coincide), invariant under permutations of its arguments, and
satisfies the simplicial inequality

    d(x_1, ..., x_n) <= sum_i d(x_1, ..., x_{i-1}, y, x_{i+1}, ..., x_n)

for every ``y`` in ``X``.  The checkers below evaluate one instance each;
:func:`fuzz_metric` drives them with a seeded sampler and
:func:`exhaustive_check` runs them over every tuple of a finite set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import UsageError
from .linalg import Rng

__all__ = [
    "MetricEvaluator",
    "PointSampler",
    "CheckResult",
    "FuzzReport",
    "check_semidefinite",
    "check_symmetry",
    "check_simplicial",
    "fuzz_metric",
    "exhaustive_check",
    "to_jsonable",
]

DEFAULT_TOL = 1e-9
SVD_TOL = 1e-7


@dataclass(frozen=True)
class MetricEvaluator:
    arity: int
    evaluate: Callable[[Sequence[Any]], float]
    label: str

    def __call__(self, points: Sequence[Any]) -> float:
        if len(points) != self.arity:
            raise UsageError(f"{self.label}: expected {self.arity} points, got {len(points)}")
        return float(self.evaluate(list(points)))


@dataclass(frozen=True)
class PointSampler:
    """Deterministic point source: ``sample(seed, index)`` -> point.

    Points of one fuzz trial share ``seed`` and differ in ``index``, so a
    sampler may draw tuple-wide parameters (a dimension, say) from ``seed``.
    """

    sample: Callable[[int, int], Any]
    description: str

    @classmethod
    def from_rng(cls, draw: Callable[[Rng], Any], description: str) -> "PointSampler":
        return cls(lambda seed, index: draw(Rng(seed).split(index)), description)


def to_jsonable(obj):
    """Convert points and witnesses to plain JSON types without losing bits."""
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(to_jsonable(v) for v in obj)
    return obj


@dataclass
class CheckResult:
    """Outcome of one axiom check.

    ``tol`` is the effective (already scaled) tolerance, so
    ``passed == (margin >= -tol)`` always holds.
    """

    kind: str
    passed: bool
    lhs: float
    rhs: float
    margin: float
    tol: float
    witness: dict | None = None
    trial: int | None = None

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.lhs), abs(self.rhs))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "witness": to_jsonable(self.witness),
            "trial": self.trial,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        return cls(**d)


def _require_arity(metric: MetricEvaluator, points: Sequence[Any]) -> None:
    if len(points) != metric.arity:
        raise UsageError(
            f"{metric.label}: expected {metric.arity} points, got {len(points)}"
        )


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def check_semidefinite(metric: MetricEvaluator, points: Sequence[Any], tol: float = DEFAULT_TOL) -> CheckResult:
    """Axiom (i): a tuple with a repeated entry must evaluate to zero."""
    _require_arity(metric, points)
    n = len(points)
    if not any(_same(points[i], points[j]) for i in range(n) for j in range(i + 1, n)):
        raise UsageError("check_semidefinite needs a tuple with a repeated entry")
    value = abs(metric(points))
    margin = -value
    passed = margin >= -tol
    witness = None if passed else {"points": list(points)}
    return CheckResult("semidefinite", passed, value, 0.0, margin, tol, witness)


def check_symmetry(
    metric: MetricEvaluator,
    points: Sequence[Any],
    permutation: Sequence[int],
    tol: float = DEFAULT_TOL,
) -> CheckResult:
    """Axiom (ii).  ``permutation`` is 0-based: slot ``i`` receives ``points[permutation[i]]``."""
    _require_arity(metric, points)
    n = len(points)
    if sorted(permutation) != list(range(n)):
        raise UsageError(f"not a permutation of range({n}): {list(permutation)}")
    lhs = metric(points)
    permuted = [points[p] for p in permutation]
    rhs = metric(permuted)
    margin = -abs(lhs - rhs)
    eff = tol * max(1.0, abs(lhs))
    passed = margin >= -eff
    witness = None if passed else {"points": list(points), "permutation": list(permutation)}
    return CheckResult("symmetry", passed, lhs, rhs, margin, eff, witness)


def check_simplicial(
    metric: MetricEvaluator, points: Sequence[Any], y: Any, tol: float = DEFAULT_TOL
) -> CheckResult:
    """Axiom (iii): ``d(x) <= sum_i d(x with y in slot i)``."""
    _require_arity(metric, points)
    pts = list(points)
    lhs = metric(pts)
    rhs = 0.0
    for i in range(len(pts)):
        swapped = pts[:i] + [y] + pts[i + 1:]
        rhs += metric(swapped)
    margin = rhs - lhs
    eff = tol * max(1.0, abs(lhs), abs(rhs))
    passed = margin >= -eff
    witness = None if passed else {"points": pts, "y": y}
    return CheckResult("simplicial", passed, lhs, rhs, margin, eff, witness)


@dataclass
class FuzzReport:
    """Aggregate of a fuzz or exhaustive run.

    ``worst_margin`` is the smallest scale-normalised margin
    ``margin / max(1, |lhs|, |rhs|)`` seen over all checks.
    """

    metric_label: str
    trials: int
    seed: int
    tol: float
    violations: list[CheckResult] = field(default_factory=list)
    worst_margin: float = float("inf")
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def _record(self, result: CheckResult, trial: int | None) -> None:
        self.checks += 1
        normalised = result.margin / result.scale
        if normalised < self.worst_margin:
            self.worst_margin = normalised
        if not result.passed:
            result.trial = trial
            self.violations.append(result)

    def to_dict(self) -> dict:
        return {
            "metric_label": self.metric_label,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "checks": self.checks,
            "worst_margin": self.worst_margin,
            "violations": [v.to_dict() for v in self.violations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FuzzReport":
        d = dict(d)
        d["violations"] = [CheckResult.from_dict(v) for v in d["violations"]]
        return cls(**d)


def _trial_seed(seed: int, trial: int) -> int:
    return Rng(seed).split(trial).next_u64()


def fuzz_metric(
    metric: MetricEvaluator,
    sampler: PointSampler,
    trials: int,
    seed: int,
    tol: float = DEFAULT_TOL,
) -> FuzzReport:
    """Run all three axiom checks on ``trials`` seeded random instances.

    Trial ``t`` uses its own sub-seed derived from ``(seed, t)``: it samples
    ``n + 1`` points (the tuple and ``y``), checks semidefiniteness on a copy
    with a uniformly chosen pair forced equal, symmetry under a random
    permutation, and the simplicial inequality.
    """
    if trials < 1:
        raise UsageError("trials must be >= 1")
    n = metric.arity
    report = FuzzReport(metric.label, trials, seed, tol)
    for t in range(trials):
        sub = _trial_seed(seed, t)
        pts = [sampler.sample(sub, i) for i in range(n + 1)]
        y = pts.pop()
        choice = Rng(sub).split(1 << 32)
        i = choice.integers(n)
        j = choice.integers(n - 1)
        if j >= i:
            j += 1
        dup = list(pts)
        dup[j] = dup[i]
        perm = choice.permutation(n)
        report._record(check_semidefinite(metric, dup, tol), t)
        report._record(check_symmetry(metric, pts, perm, tol), t)
        report._record(check_simplicial(metric, pts, y, tol), t)
    return report


def exhaustive_check(
    metric: MetricEvaluator,
    points: Sequence[Any],
    tol: float = 0.0,
    all_permutations: bool = True,
) -> FuzzReport:
    """Check every axiom on every n-tuple of a finite point set.

    Semidefiniteness is checked on every tuple with a repeat, symmetry on
    every tuple against every permutation (or a single transposition and a
    cycle when ``all_permutations`` is false; these generate the group), and
    the simplicial inequality for every tuple and every ``y``.
    """
    n = metric.arity
    pts = list(points)
    report = FuzzReport(metric.label, 0, 0, tol)
    if all_permutations:
        perms = [list(p) for p in itertools.permutations(range(n))][1:]
    else:
        perms = [[1, 0] + list(range(2, n)), list(range(1, n)) + [0]]
    for idx in itertools.product(range(len(pts)), repeat=n):
        report.trials += 1
        tup = [pts[i] for i in idx]
        if len(set(idx)) < n:
            report._record(check_semidefinite(metric, tup, tol), report.trials - 1)
        for perm in perms:
            report._record(check_symmetry(metric, tup, perm, tol), report.trials - 1)
        for y in pts:
            report._record(check_simplicial(metric, tup, y, tol), report.trials - 1)
    return report
