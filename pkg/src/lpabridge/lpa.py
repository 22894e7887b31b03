"""Exact arithmetic in the path algebra of a graph with ghost edges.

Elements are scalar combinations of monomials a·b* where a and b are paths
with a common end vertex.  Products cancel ghost edges against edges one
step at a time; sums are brought to a canonical normal form by rewriting
every junction pair e·e* whose edge is the designated special edge of its
source vertex, replacing it with the vertex minus the remaining sibling
pairs.  Each monomial has at most one rewrite position (the junction), and
every rewrite strictly shortens it or lands on irreducible monomials of
the same length, so the rewriting terminates and the normal form is
canonical.

Monomials store both paths as edge-name tuples plus the common end vertex
(``anchor``), which carries the vertex for length-0 paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, NamedTuple

from .fields import Rationals
from .graphs import Graph, GraphError, edge_by_name, out_edge_map, sinks


class LpaError(ValueError):
    """Raised for invalid monomials or incompatible operands."""


class Monomial(NamedTuple):
    alpha: tuple[str, ...]
    beta: tuple[str, ...]
    anchor: str

    @property
    def deg(self) -> int:
        return len(self.alpha) - len(self.beta)


@dataclass(frozen=True)
class LpaElement:
    """A finite scalar combination of normal-form monomials over one graph.

    ``terms`` maps Monomial to a nonzero scalar.  Treat instances as
    immutable; construct them through :func:`normalize` and friends.
    """

    graph: Graph
    terms: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms


@lru_cache(maxsize=None)
def default_special_edges(g: Graph) -> dict:
    """The designated rewrite edge per non-sink vertex: smallest edge id."""
    return {v: min(e.name for e in es) for v, es in out_edge_map(g).items() if es}


def special_edge_map(g: Graph, overrides: dict | None = None) -> dict:
    """Default special edges with optional per-vertex overrides."""
    chosen = dict(default_special_edges(g))
    if overrides:
        by_name = edge_by_name(g)
        for v, name in overrides.items():
            e = by_name.get(name)
            if e is None or e.src != v:
                raise LpaError(f"special edge {name!r} does not start at {v!r}")
            chosen[v] = name
    return chosen


def path_source(g: Graph, m: Monomial, side: str = "alpha") -> str:
    path = m.alpha if side == "alpha" else m.beta
    if not path:
        return m.anchor
    return edge_by_name(g)[path[0]].src


def validate_monomial(g: Graph, m: Monomial) -> None:
    by_name = edge_by_name(g)
    for path in (m.alpha, m.beta):
        at = None
        for name in path:
            e = by_name.get(name)
            if e is None:
                raise LpaError(f"unknown edge {name!r}")
            if at is not None and e.src != at:
                raise LpaError(f"path {path} breaks at {name!r}")
            at = e.tgt
        if at is None:
            if m.anchor not in g.vertices:
                raise LpaError(f"unknown anchor vertex {m.anchor!r}")
        elif at != m.anchor:
            raise LpaError(f"path {path} ends at {at!r}, not at anchor {m.anchor!r}")


def vertex_monomial(v: str) -> Monomial:
    return Monomial((), (), v)


def edge_monomial(g: Graph, name: str) -> Monomial:
    e = edge_by_name(g).get(name)
    if e is None:
        raise LpaError(f"unknown edge {name!r}")
    return Monomial((name,), (), e.tgt)


def ghost_monomial(g: Graph, name: str) -> Monomial:
    e = edge_by_name(g).get(name)
    if e is None:
        raise LpaError(f"unknown edge {name!r}")
    return Monomial((), (name,), e.tgt)


def normalize_tagged(g: Graph, raw: dict, special: dict | None = None) -> dict:
    """Bring a map {(tag, Monomial): scalar} to normal form.

    The tag is inert under rewriting, which acts on the monomial part
    only; this one engine serves both plain elements (tag None) and
    tensor-with-path-algebra structures.  Zero coefficients are dropped.
    """
    if special is None:
        special = default_special_edges(g)
    by_name = edge_by_name(g)
    out = out_edge_map(g)

    def reducible(m: Monomial) -> bool:
        return (
            bool(m.alpha)
            and bool(m.beta)
            and m.alpha[-1] == m.beta[-1]
            and special.get(by_name[m.alpha[-1]].src) == m.alpha[-1]
        )

    acc: dict = {}
    stack: list = []
    for key, c in raw.items():
        if not c:
            continue
        cur = acc.get(key)
        s = c if cur is None else cur + c
        if s:
            acc[key] = s
            if reducible(key[1]):
                stack.append(key)
        elif cur is not None:
            del acc[key]

    while stack:
        key = stack.pop()
        c = acc.pop(key, None)
        if c is None or not c:
            continue
        tag, m = key
        if not reducible(m):
            acc[key] = c
            continue
        e = by_name[m.alpha[-1]]
        shortened = Monomial(m.alpha[:-1], m.beta[:-1], e.src)
        updates = [((tag, shortened), c)]
        for f in out[e.src]:
            if f.name == e.name:
                continue
            sibling = Monomial(m.alpha[:-1] + (f.name,), m.beta[:-1] + (f.name,), f.tgt)
            updates.append(((tag, sibling), -c))
        for k, delta in updates:
            cur = acc.get(k)
            s = delta if cur is None else cur + delta
            if s:
                acc[k] = s
                if reducible(k[1]):
                    stack.append(k)
            elif cur is not None:
                del acc[k]
    return acc


def normalize(
    g: Graph,
    raw_terms: Iterable[tuple[Monomial, Hashable]],
    special: dict | None = None,
    validate: bool = True,
) -> LpaElement:
    """Collect raw (monomial, scalar) terms into a normal-form element."""
    raw: dict = {}
    for m, c in raw_terms:
        if validate:
            validate_monomial(g, m)
        key = (None, m)
        cur = raw.get(key)
        raw[key] = c if cur is None else cur + c
    acc = normalize_tagged(g, raw, special)
    return LpaElement(g, {m: c for (_, m), c in acc.items()})


def mono_product(g: Graph, m1: Monomial, m2: Monomial) -> Monomial | None:
    """The product of two monomials: a single monomial or None (zero).

    Cancellation: (a b*)(c d*) is a(c') d* when c = b·c', or a (d·b')* when
    b = c·b', and zero otherwise.
    """
    b, c = m1.beta, m2.alpha
    if path_source(g, m1, "beta") != path_source(g, m2, "alpha"):
        return None
    k = min(len(b), len(c))
    if b[:k] != c[:k]:
        return None
    if len(b) <= len(c):
        return Monomial(m1.alpha + c[len(b):], m2.beta, m2.anchor)
    return Monomial(m1.alpha, m2.beta + b[len(c):], m1.anchor)


def multiply(a: LpaElement, b: LpaElement, special: dict | None = None) -> LpaElement:
    """Exact product, brought to normal form."""
    if a.graph != b.graph:
        raise LpaError("cannot multiply elements over different graphs")
    g = a.graph
    raw: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m = mono_product(g, m1, m2)
            if m is None:
                continue
            key = (None, m)
            c = c1 * c2
            cur = raw.get(key)
            raw[key] = c if cur is None else cur + c
    acc = normalize_tagged(g, raw, special)
    return LpaElement(g, {m: c for (_, m), c in acc.items()})


def add(a: LpaElement, b: LpaElement) -> LpaElement:
    if a.graph != b.graph:
        raise LpaError("cannot add elements over different graphs")
    terms = dict(a.terms)
    for m, c in b.terms.items():
        cur = terms.get(m)
        s = c if cur is None else cur + c
        if s:
            terms[m] = s
        elif cur is not None:
            del terms[m]
    return LpaElement(a.graph, terms)


def scale(a: LpaElement, c) -> LpaElement:
    if not c:
        return LpaElement(a.graph, {})
    return LpaElement(a.graph, {m: c * x for m, x in a.terms.items()})


def zero(g: Graph) -> LpaElement:
    return LpaElement(g, {})


def unit(g: Graph, fld=Rationals) -> LpaElement:
    """The sum of all vertices."""
    if not g.vertices:
        raise LpaError("unit of the empty graph does not exist")
    return LpaElement(g, {vertex_monomial(v): fld.one for v in g.vertices})


def element(g: Graph, raw_terms, special: dict | None = None) -> LpaElement:
    """Convenience constructor from (alpha, beta, anchor, coeff) tuples."""
    return normalize(
        g,
        [(Monomial(tuple(al), tuple(be), an), c) for al, be, an, c in raw_terms],
        special,
    )


def vertex_expansion(g: Graph, v: str, m: int, fld=Rationals) -> list:
    """The unnormalized sum of p·p* over all length-m paths p starting at v.

    Requires a sink-free graph; normalizing the result yields the vertex.
    """
    if m < 1:
        raise LpaError("expansion length must be >= 1")
    bad = sinks(g)
    if bad:
        raise LpaError(f"graph has sinks {bad}; expansion undefined")
    out = out_edge_map(g)
    acc = [((), v)]
    for _ in range(m):
        acc = [(names + (e.name,), e.tgt) for names, end in acc for e in out[end]]
    return [(Monomial(names, names, end), fld.one) for names, end in acc]


def degree(x: LpaElement) -> int | None:
    """The common degree (alpha length minus beta length), or None if mixed
    or zero."""
    degs = {m.deg for m in x.terms}
    if len(degs) != 1:
        return None
    return degs.pop()


def homogeneous_components(x: LpaElement) -> dict:
    """Split by degree; the components sum back to the element."""
    parts: dict[int, dict] = {}
    for m, c in x.terms.items():
        parts.setdefault(m.deg, {})[m] = c
    return {d: LpaElement(x.graph, terms) for d, terms in sorted(parts.items())}
