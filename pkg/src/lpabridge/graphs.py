"""Finite directed graphs, polymorphisms, and their nonnegative integer adjacency matrices.

A polymorphism is a bipartite edge system from one ordered vertex set to
another; a graph is the special case where the two sets coincide.  All
values are immutable and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple


class GraphError(ValueError):
    """Raised for malformed graphs/matrices or incompatible operands."""


class Edge(NamedTuple):
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class Polymorphism:
    """An edge system from ``source_vertices`` to ``target_vertices``.

    Vertex order is the declared order and is used consistently for matrix
    indexing.  Edge names are unique.
    """

    source_vertices: tuple[str, ...]
    target_vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "source_vertices", tuple(self.source_vertices))
        object.__setattr__(self, "target_vertices", tuple(self.target_vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        if len(set(self.source_vertices)) != len(self.source_vertices):
            raise GraphError("duplicate source vertex ids")
        if len(set(self.target_vertices)) != len(self.target_vertices):
            raise GraphError("duplicate target vertex ids")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise GraphError("duplicate edge ids")
        srcs = set(self.source_vertices)
        tgts = set(self.target_vertices)
        for e in self.edges:
            if e.src not in srcs:
                raise GraphError(f"edge {e.name!r} has unknown source {e.src!r}")
            if e.tgt not in tgts:
                raise GraphError(f"edge {e.name!r} has unknown target {e.tgt!r}")


@dataclass(frozen=True)
class Graph(Polymorphism):
    """A polymorphism whose source and target vertex sets are the same ordered set."""

    def __post_init__(self):
        super().__post_init__()
        if self.source_vertices != self.target_vertices:
            raise GraphError("graph requires identical source and target vertex sets")

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.source_vertices


def graph(vertices, edges) -> Graph:
    """Build a graph from one vertex list and (name, src, tgt) edges."""
    vertices = tuple(vertices)
    return Graph(vertices, vertices, tuple(Edge(*e) for e in edges))


@lru_cache(maxsize=None)
def out_edge_map(p: Polymorphism) -> dict:
    m = {v: [] for v in p.source_vertices}
    for e in p.edges:
        m[e.src].append(e)
    return {v: tuple(es) for v, es in m.items()}


@lru_cache(maxsize=None)
def edge_by_name(p: Polymorphism) -> dict:
    return {e.name: e for e in p.edges}


def sinks(g: Graph) -> tuple[str, ...]:
    out = out_edge_map(g)
    return tuple(v for v in g.vertices if not out[v])


def is_sink_free(g: Graph) -> bool:
    return not sinks(g)


@dataclass(frozen=True)
class NonNegMatrix:
    """A rectangular matrix with nonnegative integer entries, indexed by vertex ids."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))
        if len(self.entries) != len(self.rows):
            raise GraphError("row count does not match row index set")
        for row in self.entries:
            if len(row) != len(self.cols):
                raise GraphError("column count does not match column index set")
            for x in row:
                if not isinstance(x, int) or x < 0:
                    raise GraphError(f"matrix entry {x!r} is not a nonnegative integer")

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, v: str, w: str) -> int:
        return self.entries[self.rows.index(v)][self.cols.index(w)]

    def __matmul__(self, other: "NonNegMatrix") -> "NonNegMatrix":
        if self.cols != other.rows:
            raise GraphError("matrix product: inner index sets do not match")
        prod = tuple(
            tuple(
                sum(self.entries[i][k] * other.entries[k][j] for k in range(len(self.cols)))
                for j in range(len(other.cols))
            )
            for i in range(len(self.rows))
        )
        return NonNegMatrix(self.rows, other.cols, prod)

    def matrix_power(self, n: int) -> "NonNegMatrix":
        if not self.is_square:
            raise GraphError("matrix power requires a square matrix")
        if n < 1:
            raise GraphError("matrix power requires n >= 1")
        out = self
        for _ in range(n - 1):
            out = out @ self
        return out

    @staticmethod
    def identity(labels) -> "NonNegMatrix":
        labels = tuple(labels)
        ent = tuple(tuple(1 if i == j else 0 for j in range(len(labels))) for i in range(len(labels)))
        return NonNegMatrix(labels, labels, ent)

    @staticmethod
    def zero(rows, cols) -> "NonNegMatrix":
        rows, cols = tuple(rows), tuple(cols)
        return NonNegMatrix(rows, cols, tuple(tuple(0 for _ in cols) for _ in rows))


def adjacency(p: Polymorphism) -> NonNegMatrix:
    """Entry (v, w) counts the edges from v to w."""
    ri = {v: i for i, v in enumerate(p.source_vertices)}
    ci = {w: j for j, w in enumerate(p.target_vertices)}
    counts = [[0] * len(p.target_vertices) for _ in p.source_vertices]
    for e in p.edges:
        counts[ri[e.src]][ci[e.tgt]] += 1
    return NonNegMatrix(p.source_vertices, p.target_vertices, tuple(tuple(r) for r in counts))


def polymorphism_from_matrix(a: NonNegMatrix) -> Polymorphism:
    """Draw A(v, w) edges from v to w, with generated edge ids ``v→w#i``.

    Returns a Graph when the row and column index sets coincide.
    """
    edges = []
    for i, v in enumerate(a.rows):
        for j, w in enumerate(a.cols):
            for k in range(a.entries[i][j]):
                edges.append(Edge(f"{v}→{w}#{k}", v, w))
    if a.rows == a.cols:
        return Graph(a.rows, a.cols, tuple(edges))
    return Polymorphism(a.rows, a.cols, tuple(edges))


def identity_polymorphism(vertices) -> Polymorphism:
    vertices = tuple(vertices)
    return Polymorphism(vertices, vertices, tuple(Edge(v, v, v) for v in vertices))


def product(p: Polymorphism, q: Polymorphism) -> Polymorphism:
    """Composable-edge pairs (e, f) with tgt(e) = src(f); adjacency multiplies."""
    if p.target_vertices != q.source_vertices:
        raise GraphError("polymorphism product: middle vertex sets do not match")
    edges = tuple(
        Edge(f"({e.name},{f.name})", e.src, f.tgt)
        for e in p.edges
        for f in q.edges
        if e.tgt == f.src
    )
    return Polymorphism(p.source_vertices, q.target_vertices, edges)


def power(g: Graph, n: int) -> Polymorphism:
    """The n-fold product of a graph with itself (n >= 1)."""
    if n < 1:
        raise GraphError("graph power requires n >= 1")
    out: Polymorphism = g
    for _ in range(n - 1):
        out = product(out, g)
    return out


def iso_check(p: Polymorphism, q: Polymorphism) -> bool:
    """Isomorphic over fixed vertex sets iff the adjacency matrices agree."""
    if p.source_vertices != q.source_vertices or p.target_vertices != q.target_vertices:
        raise GraphError("iso check requires identical source and target vertex sets")
    return adjacency(p) == adjacency(q)


def paths_from(g: Graph, v: str, length: int) -> tuple[tuple[str, ...], ...]:
    """All edge-name paths of exactly the given length starting at v, in edge order."""
    out = out_edge_map(g)
    acc: list[tuple[tuple[str, ...], str]] = [((), v)]
    for _ in range(length):
        acc = [(names + (e.name,), e.tgt) for names, end in acc for e in out[end]]
    return tuple(names for names, _ in acc)


def path_range(g: Graph, path: tuple[str, ...], start: str) -> str:
    """End vertex of an edge-name path beginning at ``start``."""
    by_name = edge_by_name(g)
    at = start
    for name in path:
        e = by_name[name]
        if e.src != at:
            raise GraphError(f"path step {name!r} does not start at {at!r}")
        at = e.tgt
    return at


def iter_sink_free_graphs(max_vertices: int, max_multiplicity: int):
    """Yield every sink-free graph with up to the given vertex count and
    at most ``max_multiplicity`` parallel edges per ordered vertex pair.

    Deterministic order: vertex count ascending, then adjacency rows in
    lexicographic order.  Vertex ids are v1, v2, ...
    """
    for nv in range(1, max_vertices + 1):
        vertices = tuple(f"v{i}" for i in range(1, nv + 1))
        rows_choices = [
            row
            for row in itertools.product(range(max_multiplicity + 1), repeat=nv)
            if any(row)
        ]
        for rows in itertools.product(rows_choices, repeat=nv):
            m = NonNegMatrix(vertices, vertices, tuple(rows))
            yield polymorphism_from_matrix(m)
