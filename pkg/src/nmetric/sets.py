"""Hausdorff-style n-distance between finite subsets, and a table on which it fails.

With ``d`` a pseudo n-metric on a finite set ``X``::

    dist(x1; A2..An)  = min  d(x1, x2, ..., xn)   over x_j in A_j
    dist(A1; A2..An)  = max  dist(x1; A2..An)     over x1 in A1
    d_H(A1..An)       = max  dist(A_j; the others)

For ``n = 2`` this is the classical Hausdorff distance.  For ``n = 3``,
:func:`build_counterexample` gives a pseudo 3-metric whose ``d_H`` breaks
the simplicial inequality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .axioms import MetricEvaluator, exhaustive_check
from .errors import ConstructionBug, UsageError

__all__ = [
    "FiniteMetricTable",
    "SubsetFamily",
    "dist_point",
    "dist_set",
    "d_hausdorff_n",
    "Counterexample",
    "build_counterexample",
    "counterexample_rule",
    "verify_counterexample",
    "CounterexampleReport",
]


class FiniteMetricTable:
    """A symmetric function on n-tuples of a finite labelled point set.

    Values are stored for sorted index tuples without repeats; tuples with a
    repeat read as zero.  Lookups accept labels.
    """

    def __init__(self, points: Sequence[Hashable], n: int, values: dict[tuple[int, ...], float]):
        self.points = list(points)
        if len(set(self.points)) != len(self.points):
            raise UsageError("point labels must be distinct")
        if n < 2:
            raise UsageError("arity must be at least 2")
        self.n = n
        self.index = {p: i for i, p in enumerate(self.points)}
        self.values: dict[tuple[int, ...], float] = {}
        for key, v in values.items():
            key = tuple(sorted(key))
            if len(key) != n or len(set(key)) != n:
                raise UsageError(f"table key {key} is not an n-set of indices")
            if v < 0:
                raise UsageError(f"negative value at {key}")
            self.values[key] = float(v)
        for key in itertools.combinations(range(len(self.points)), n):
            if key not in self.values:
                raise UsageError(f"table is missing the value at {[self.points[i] for i in key]}")

    @classmethod
    def from_function(cls, points: Sequence[Hashable], n: int, f: Callable[[tuple], float]) -> "FiniteMetricTable":
        """Tabulate ``f`` (called on sorted label tuples of distinct points)."""
        pts = list(points)
        vals = {c: f(tuple(pts[i] for i in c)) for c in itertools.combinations(range(len(pts)), n)}
        return cls(pts, n, vals)

    def ids(self, tup: Sequence[Hashable]) -> list[int]:
        try:
            return [self.index[p] for p in tup]
        except KeyError as exc:
            raise UsageError(f"unknown point {exc.args[0]!r}") from None

    def value_ids(self, ids: Sequence[int]) -> float:
        key = tuple(sorted(ids))
        if len(set(key)) < len(key):
            return 0.0
        return self.values[key]

    def __call__(self, tup: Sequence[Hashable]) -> float:
        if len(tup) != self.n:
            raise UsageError(f"expected {self.n} points, got {len(tup)}")
        return self.value_ids(self.ids(tup))

    def metric(self) -> MetricEvaluator:
        return MetricEvaluator(self.n, self, f"table(n={self.n},|X|={len(self.points)})")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "points": list(self.points),
            "values": [
                {"tuple": [self.points[i] for i in key], "value": v}
                for key, v in sorted(self.values.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteMetricTable":
        try:
            pts = list(d["points"])
            idx = {p: i for i, p in enumerate(pts)}
            vals = {tuple(idx[p] for p in e["tuple"]): float(e["value"]) for e in d["values"]}
            return cls(pts, int(d["n"]), vals)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed table description: {exc}") from exc


@dataclass
class SubsetFamily:
    """``n`` nonempty subsets of a table's points, stored as label lists."""

    subsets: list[list[Hashable]]

    def __post_init__(self):
        self.subsets = [list(a) for a in self.subsets]
        if any(len(a) == 0 for a in self.subsets):
            raise UsageError("subsets must be nonempty")

    def __len__(self):
        return len(self.subsets)

    def __getitem__(self, j):
        return self.subsets[j]


def _nonempty(subsets) -> list[list]:
    out = [list(a) for a in subsets]
    if any(len(a) == 0 for a in out):
        raise UsageError("subsets must be nonempty")
    return out


def dist_point(d: FiniteMetricTable, x1: Hashable, rest: Sequence[Sequence[Hashable]]) -> float:
    rest = _nonempty(rest)
    if len(rest) != d.n - 1:
        raise UsageError(f"expected {d.n - 1} subsets after the point, got {len(rest)}")
    i1 = d.ids([x1])[0]
    id_sets = [d.ids(a) for a in rest]
    return min(d.value_ids((i1,) + combo) for combo in itertools.product(*id_sets))


def dist_set(d: FiniteMetricTable, A1: Sequence[Hashable], rest: Sequence[Sequence[Hashable]]) -> float:
    A1 = _nonempty([A1])[0]
    return max(dist_point(d, x, rest) for x in A1)


def d_hausdorff_n(d: FiniteMetricTable, family) -> float:
    sets = _nonempty(family.subsets if isinstance(family, SubsetFamily) else family)
    if len(sets) != d.n:
        raise UsageError(f"expected {d.n} subsets, got {len(sets)}")
    return max(dist_set(d, sets[j], sets[:j] + sets[j + 1:]) for j in range(len(sets)))


# ---------------------------------------------------------------------------
# the counterexample table (n = 3)


def counterexample_rule(a: tuple[int, int], b: tuple[int, int], c: tuple[int, int]) -> int:
    """Value on three distinct points given as ``(set, position)``.

    Sets are 1..4 (``w``, ``x``, ``y``, ``z``), positions are 1-based, and the
    arguments must already be ordered by set index.
    """
    (s1, p1), (s2, p2), (s3, p3) = a, b, c
    sig = (s1, s2, s3)
    if s1 == s3:
        return 0
    if sig == (1, 2, 3):
        return 1
    if sig == (1, 2, 4):
        return int(p2 == p3)
    if sig == (1, 3, 4):
        return int(p2 == p3)
    if sig == (2, 3, 4):
        return int(not (p1 == p2 == p3))
    if s1 == 1 and s2 == s3:
        return 0
    if sig == (2, 2, 4):
        return int(p2 == p3 or p1 == p3)
    if sig == (2, 4, 4):
        return int(p1 == p2 or p1 == p3)
    if sig == (3, 3, 4):
        return int(p1 == p3 or p2 == p3)
    if sig == (3, 4, 4):
        return int(p1 == p2 or p1 == p3)
    if sig in ((2, 2, 3), (2, 3, 3)):
        return 1
    raise ConstructionBug(f"no rule for set pattern {sig}")


@dataclass
class Counterexample:
    N: int
    table: FiniteMetricTable
    subsets: list[list[str]]


def build_counterexample(N: int) -> Counterexample:
    """Points ``w1``, ``x1..xN``, ``y1..yN``, ``z1..zN`` and the four subsets."""
    if not isinstance(N, int) or N < 2:
        raise UsageError("N must be an integer >= 2")
    tags = []  # (set, position) per point index
    labels = []
    tags.append((1, 1))
    labels.append("w1")
    for s, letter in ((2, "x"), (3, "y"), (4, "z")):
        for p in range(1, N + 1):
            tags.append((s, p))
            labels.append(f"{letter}{p}")
    values = {}
    for key in itertools.combinations(range(len(labels)), 3):
        # index order already sorts by (set, position)
        values[key] = float(counterexample_rule(*(tags[i] for i in key)))
    subsets = [["w1"]] + [[f"{c}{p}" for p in range(1, N + 1)] for c in "xyz"]
    return Counterexample(N, FiniteMetricTable(labels, 3, values), subsets)


@dataclass
class CounterexampleReport:
    N: int
    axiom_checks: int
    lhs: float
    substituted: list[float] = field(default_factory=list)

    @property
    def rhs(self) -> float:
        return sum(self.substituted)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "axiom_checks": self.axiom_checks,
            "lhs": self.lhs,
            "substituted": list(self.substituted),
            "rhs": self.rhs,
            "margin": self.margin,
        }


def verify_counterexample(N: int) -> CounterexampleReport:
    """Exhaustively confirm the table is a pseudo 3-metric and that ``d_H`` is not.

    Raises :class:`ConstructionBug` if either half fails.
    """
    if not isinstance(N, int) or not 2 <= N <= 4:
        raise UsageError("N must be in [2, 4] for exhaustive verification")
    cx = build_counterexample(N)
    report = exhaustive_check(cx.table.metric(), cx.table.points, tol=0.0)
    if not report.ok:
        v = report.violations[0]
        raise ConstructionBug(f"table violates the {v.kind} axiom at {v.witness}")
    A1, A2, A3, A4 = cx.subsets
    lhs = d_hausdorff_n(cx.table, [A1, A2, A3])
    subs = [
        d_hausdorff_n(cx.table, [A4, A2, A3]),
        d_hausdorff_n(cx.table, [A1, A4, A3]),
        d_hausdorff_n(cx.table, [A1, A2, A4]),
    ]
    out = CounterexampleReport(N, report.checks, lhs, subs)
    if not (lhs == 1.0 and subs == [0.0, 0.0, 0.0]):
        raise ConstructionBug(f"expected d_H values 1 > 0+0+0, got {lhs} vs {subs}")
    return out
