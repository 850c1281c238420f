"""Uniform hypergraphs and the minimal-connecting-component pseudo n-metric.

For a connected n-uniform hypergraph, the distance of ``n`` distinct
vertices is the least number of hyperedges in a connected edge set whose
union contains all of them.  Finding that set is a Steiner-type problem, so
the search is exact and guarded by a capacity limit instead of approximated.
"""

from __future__ import annotations

import math
from typing import Hashable, Iterable, Sequence

from .axioms import MetricEvaluator
from .errors import CapacityError, DisconnectedHypergraph, UsageError
from .linalg import Rng

__all__ = [
    "Hypergraph",
    "MAX_EDGES",
    "is_connected_component",
    "is_connected",
    "d_hyper",
    "sharper_inequality_margin",
    "hyper_metric",
    "random_connected_hypergraph",
    "example_hypergraph",
]

MAX_EDGES = 24


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _intersect(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """Sorted-merge intersection test."""
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return True
        if a[i] < b[j]:
            i += 1
        else:
            j += 1
    return False


class Hypergraph:
    """An n-uniform hypergraph over opaque vertex labels.

    Labels are mapped to dense integers at construction; edges are stored
    as sorted integer tuples.  ``force`` lifts the :data:`MAX_EDGES` guard
    on the exact distance search.
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Iterable[Hashable]], n: int | None = None, force: bool = False):
        self.labels = list(vertices)
        if len(set(self.labels)) != len(self.labels):
            raise UsageError("vertex labels must be distinct")
        self.index = {v: i for i, v in enumerate(self.labels)}
        edge_list = [list(e) for e in edges]
        if n is None:
            if not edge_list:
                raise UsageError("arity n is required for a hypergraph without edges")
            n = len(edge_list[0])
        if n < 2:
            raise UsageError("hyperedges need at least two vertices")
        self.n = n
        self.force = force
        seen = set()
        self.edges: list[tuple[int, ...]] = []
        for e in edge_list:
            if len(e) != n or len(set(e)) != n:
                raise UsageError(f"edge {e} does not have exactly {n} distinct vertices")
            try:
                key = tuple(sorted(self.index[v] for v in e))
            except KeyError as exc:
                raise UsageError(f"edge {e} uses unknown vertex {exc.args[0]!r}") from None
            if key in seen:
                raise UsageError(f"duplicate edge {e}")
            seen.add(key)
            self.edges.append(key)
        self._edge_sets = [frozenset(e) for e in self.edges]
        self._cache: dict[frozenset, int] = {}
        self._connected: bool | None = None

    def __repr__(self):
        return f"Hypergraph(n={self.n}, |V|={len(self.labels)}, |E|={len(self.edges)})"

    def edge_labels(self, idx: int) -> list:
        return [self.labels[v] for v in self.edges[idx]]

    def with_edge(self, edge: Iterable[Hashable]) -> "Hypergraph":
        return Hypergraph(self.labels, [self.edge_labels(i) for i in range(len(self.edges))] + [list(edge)], self.n, self.force)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": list(self.labels),
            "edges": [self.edge_labels(i) for i in range(len(self.edges))],
        }

    @classmethod
    def from_dict(cls, d: dict, force: bool = False) -> "Hypergraph":
        try:
            return cls([str(v) for v in d["vertices"]], [[str(v) for v in e] for e in d["edges"]], int(d["n"]), force)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed hypergraph description: {exc}") from exc

    # ------------------------------------------------------------------

    def _component_ok(self, P: Sequence[int]) -> bool:
        uf = _UnionFind(len(P))
        for a in range(len(P)):
            for b in range(a + 1, len(P)):
                if _intersect(self.edges[P[a]], self.edges[P[b]]):
                    uf.union(a, b)
        return len({uf.find(a) for a in range(len(P))}) == 1

    def connected(self) -> bool:
        if self._connected is None:
            covered = set().union(*self._edge_sets) if self.edges else set()
            self._connected = (
                bool(self.edges)
                and self._component_ok(range(len(self.edges)))
                and covered == set(range(len(self.labels)))
            )
        return self._connected

    def vertex_ids(self, tup: Sequence[Hashable]) -> list[int]:
        try:
            return [self.index[v] for v in tup]
        except KeyError as exc:
            raise UsageError(f"unknown vertex {exc.args[0]!r}") from None

    def min_connecting(self, targets: frozenset) -> int:
        """Size of the smallest connected edge set whose union contains ``targets``."""
        if targets in self._cache:
            return self._cache[targets]
        m = len(self.edges)
        sets = self._edge_sets
        n = self.n
        first = min(targets)
        roots = [e for e in range(m) if first in sets[e]]
        result = None
        for p in range(1, m + 1):
            seen: set[frozenset] = set()

            def grow(chosen: frozenset, covered: frozenset) -> bool:
                missing = len(targets - covered)
                if missing == 0:
                    return True
                room = p - len(chosen)
                if room == 0 or math.ceil(missing / n) > room:
                    return False
                for e in range(m):
                    if e in chosen or not (sets[e] & covered):
                        continue
                    nxt = chosen | {e}
                    if nxt in seen:
                        continue
                    seen.add(nxt)
                    if grow(nxt, covered | sets[e]):
                        return True
                return False

            for r in roots:
                start = frozenset([r])
                if start in seen:
                    continue
                seen.add(start)
                if grow(start, sets[r]):
                    result = p
                    break
            if result is not None:
                break
        if result is None:  # pragma: no cover - connected graphs always succeed
            raise DisconnectedHypergraph("no connected edge set covers the tuple")
        self._cache[targets] = result
        return result


def is_connected_component(H: Hypergraph, P: Sequence[int]) -> bool:
    """True when the edges ``P`` (indices into ``H.edges``) form one chain-connected block."""
    P = list(P)
    if not P:
        raise UsageError("edge subset must be nonempty")
    if len(set(P)) != len(P) or not all(0 <= i < len(H.edges) for i in P):
        raise UsageError(f"invalid edge indices {P}")
    return H._component_ok(P)


def is_connected(H: Hypergraph) -> bool:
    return H.connected()


def d_hyper(H: Hypergraph, tup: Sequence[Hashable]) -> int:
    if len(tup) != H.n:
        raise UsageError(f"expected {H.n} vertices, got {len(tup)}")
    ids = H.vertex_ids(tup)
    if len(set(ids)) < len(ids):
        return 0
    if len(H.edges) > MAX_EDGES and not H.force:
        raise CapacityError(f"{len(H.edges)} edges exceeds the exact-search limit {MAX_EDGES}; pass force")
    if not H.connected():
        raise DisconnectedHypergraph("the distance is defined for connected hypergraphs only")
    return H.min_connecting(frozenset(ids))


def sharper_inequality_margin(H: Hypergraph, tup: Sequence[Hashable], y: Hashable) -> int:
    """``max_{i<j} (d(tup, y at i) + d(tup, y at j)) - d(tup)``; never negative."""
    tup = list(tup)
    n = len(tup)
    if n != H.n:
        raise UsageError(f"expected {H.n} vertices, got {n}")
    swapped = [d_hyper(H, tup[:i] + [y] + tup[i + 1:]) for i in range(n)]
    best = max(swapped[i] + swapped[j] for i in range(n) for j in range(i + 1, n))
    return best - d_hyper(H, tup)


def hyper_metric(H: Hypergraph) -> MetricEvaluator:
    return MetricEvaluator(H.n, lambda t: d_hyper(H, t), f"hyper(n={H.n},|V|={len(H.labels)},|E|={len(H.edges)})")


def example_hypergraph() -> Hypergraph:
    """The four-vertex 3-uniform hypergraph with edges 124, 234, 134."""
    return Hypergraph(["1", "2", "3", "4"], [["1", "2", "4"], ["2", "3", "4"], ["1", "3", "4"]], 3)


def random_connected_hypergraph(rng: Rng, n: int, n_vertices: int, n_edges: int) -> Hypergraph:
    """Random connected n-uniform hypergraph on vertices ``"0".."V-1"``.

    Edges are first added so that each one overlaps the covered set and
    brings in at least one new vertex, until all vertices are covered; then
    random distinct edges are added up to ``n_edges``.  The edge count may
    exceed ``n_edges`` when fewer edges cannot cover the vertices, and is
    capped by the number of possible n-subsets.
    """
    if n_vertices < n:
        raise UsageError("need at least n vertices")
    verts = list(range(n_vertices))
    perm = rng.permutation(n_vertices)
    first = tuple(sorted(perm[:n]))
    edges = [first]
    covered = set(first)
    while len(covered) < n_vertices:
        inside = sorted(covered)
        outside = [v for v in verts if v not in covered]
        a = outside[rng.integers(len(outside))]
        b = inside[rng.integers(len(inside))]
        rest = [v for v in verts if v not in (a, b)]
        picks = [rest[i] for i in rng.permutation(len(rest))[: n - 2]]
        e = tuple(sorted([a, b] + picks))
        if e not in edges:
            edges.append(e)
            covered.update(e)
    total = math.comb(n_vertices, n)
    target = min(max(n_edges, len(edges)), total)
    while len(edges) < target:
        e = tuple(sorted(rng.permutation(n_vertices)[:n]))
        if e not in edges:
            edges.append(e)
    return Hypergraph([str(v) for v in verts], [[str(v) for v in e] for e in edges], n)
