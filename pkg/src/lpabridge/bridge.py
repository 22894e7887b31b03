"""The bridging bimodule of a conjugacy pair: the module tensored with the
path algebra of the right-hand graph, carrying a left action of the
left-hand graph's path algebra.

Elements are scalar combinations of (basis name, monomial) pairs, with the
monomial in normal form over the right-hand graph.  Vertices act by source
filtering, edges act through the chosen isomorphism sigma, and ghost edges
act through its inverse.  Every generator maps a basis element to a finite
sum, so all verification is per-basis-element exact evaluation, bounded by
monomial length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fields import Rationals
from .graphs import Graph, edge_by_name, is_sink_free, paths_from, path_range, sinks
from .lpa import (
    LpaElement,
    LpaError,
    Monomial,
    default_special_edges,
    mono_product,
    normalize,
    normalize_tagged,
    path_source,
    validate_monomial,
    vertex_monomial,
)
from .bimodules import (
    ConjugacyPair,
    bimodule_of_polymorphism,
    basis_index,
    column,
    edge_power_bimodule,
    flatten_name,
    hash_compose,
    invert,
    tensor,
    verify_conjugacy,
)


class BridgeError(ValueError):
    """Raised for invalid bridge elements or incompatible pairs."""


@dataclass(eq=True)
class BridgeElement:
    """A finite combination of (module basis name, normal-form monomial)
    pairs over a conjugacy pair.  Treat instances as immutable."""

    pair: ConjugacyPair
    terms: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms


def bridge_element(pair: ConjugacyPair, raw_terms) -> BridgeElement:
    """Build a bridge element from (basis name, Monomial, coeff) triples,
    validating the pairing and normalizing the monomial parts."""
    f = pair.F
    tgt_of = {b.name: b.tgt for b in pair.M.basis}
    raw: dict = {}
    for name, mono, c in raw_terms:
        if name not in tgt_of:
            raise BridgeError(f"unknown module basis name {name!r}")
        validate_monomial(f, mono)
        if tgt_of[name] != path_source(f, mono, "alpha"):
            raise BridgeError(
                f"basis vector {name!r} ends at {tgt_of[name]!r} but the monomial "
                f"starts at {path_source(f, mono, 'alpha')!r}"
            )
        key = (name, mono)
        cur = raw.get(key)
        raw[key] = c if cur is None else cur + c
    return BridgeElement(pair, normalize_tagged(f, raw))


class BridgeActions:
    """Precomputed action data for one verified conjugacy pair.

    Columns of sigma give the edge action; columns of its inverse, indexed
    additionally by the edge of the left graph, give the ghost action.
    """

    def __init__(self, pair: ConjugacyPair):
        if not verify_conjugacy(pair):
            raise BridgeError("conjugacy pair fails verification; no action defined")
        self.pair = pair
        self.E = pair.E
        self.F = pair.F
        self.special_F = default_special_edges(pair.F)
        self.src_of = {b.name: b.src for b in pair.M.basis}
        self.tgt_of = {b.name: b.tgt for b in pair.M.basis}
        self.f_edges = edge_by_name(pair.F)
        self.e_edges = edge_by_name(pair.E)

        dom = pair.sigma.domain  # edges(E) tensor M
        cod = pair.sigma.codomain  # M tensor edges(F)
        sigma_inv = invert(pair.sigma)
        # sigma columns: (e name, m name) -> ((m' name, F edge, coeff), ...)
        self.sig_cols: dict = {}
        for (i, j), v in pair.sigma.matrix.items():
            e_name, m_name = dom.basis[j].name
            m2, f_name = cod.basis[i].name
            self.sig_cols.setdefault((e_name, m_name), []).append(
                (m2, self.f_edges[f_name], v)
            )
        # inverse columns: (m name, f name) -> {e name: ((m' name, coeff), ...)}
        self.inv_cols: dict = {}
        for (i, j), v in sigma_inv.matrix.items():
            m_name, f_name = cod.basis[j].name
            e_name, m2 = dom.basis[i].name
            self.inv_cols.setdefault((m_name, f_name), {}).setdefault(e_name, []).append((m2, v))

    # The raw term maps below are dicts {(m name, Monomial): scalar}.

    def act_vertex_raw(self, v: str, terms: dict) -> dict:
        if v not in self.E.vertices:
            raise BridgeError(f"unknown vertex {v!r}")
        return {key: c for key, c in terms.items() if self.src_of[key[0]] == v}

    def act_edge_raw(self, e_name: str, terms: dict) -> dict:
        if e_name not in self.e_edges:
            raise BridgeError(f"unknown edge {e_name!r}")
        raw: dict = {}
        for (m_name, mono), c in terms.items():
            col = self.sig_cols.get((e_name, m_name))
            if not col:
                continue
            for m2, f_edge, coef in col:
                prod = _prepend_edge(f_edge, mono)
                if prod is None:
                    continue
                key = (m2, prod)
                add = c * coef
                cur = raw.get(key)
                s = add if cur is None else cur + add
                if s:
                    raw[key] = s
                elif cur is not None:
                    del raw[key]
        return normalize_tagged(self.F, raw, self.special_F)

    def act_ghost_raw(self, e_name: str, terms: dict) -> dict:
        if e_name not in self.e_edges:
            raise BridgeError(f"unknown edge {e_name!r}")
        raw: dict = {}
        for (m_name, mono), c in terms.items():
            if mono.alpha:
                candidates = (self.f_edges[mono.alpha[0]],)
            else:
                candidates = tuple(
                    e for e in self.F.edges if e.src == mono.anchor
                )
            for f_edge in candidates:
                by_edge = self.inv_cols.get((m_name, f_edge.name))
                if not by_edge:
                    continue
                entries = by_edge.get(e_name)
                if not entries:
                    continue
                prod = _prepend_ghost(f_edge, mono)
                if prod is None:
                    continue
                for m2, coef in entries:
                    key = (m2, prod)
                    add = c * coef
                    cur = raw.get(key)
                    s = add if cur is None else cur + add
                    if s:
                        raw[key] = s
                    elif cur is not None:
                        del raw[key]
        return normalize_tagged(self.F, raw, self.special_F)

    def act_monomial_raw(self, mono: Monomial, terms: dict) -> dict:
        """Act by a monomial of the left graph, one generator at a time."""
        if not mono.alpha and not mono.beta:
            return self.act_vertex_raw(mono.anchor, terms)
        out = terms
        for name in mono.beta:
            out = self.act_ghost_raw(name, out)
            if not out:
                return out
        for name in reversed(mono.alpha):
            out = self.act_edge_raw(name, out)
            if not out:
                return out
        return out

    def act_element_raw(self, a: LpaElement, terms: dict) -> dict:
        if a.graph != self.E:
            raise BridgeError("element is over the wrong left graph")
        acc: dict = {}
        for mono, c in a.terms.items():
            part = self.act_monomial_raw(mono, terms)
            for key, v in part.items():
                add = c * v
                cur = acc.get(key)
                s = add if cur is None else cur + add
                if s:
                    acc[key] = s
                elif cur is not None:
                    del acc[key]
        return acc


def _prepend_edge(f_edge, mono: Monomial) -> Monomial | None:
    """Left-multiply a monomial by an edge of its graph.

    Callers guarantee composability (the edge ends where the monomial's
    path side starts), which holds whenever the bridge pairing invariant
    and the block structure of sigma are maintained.
    """
    if not mono.alpha and f_edge.tgt != mono.anchor:
        return None
    return Monomial((f_edge.name,) + mono.alpha, mono.beta, mono.anchor)


def _prepend_ghost(f_edge, mono: Monomial) -> Monomial | None:
    """Left-multiply a monomial by a ghost edge of its graph."""
    if mono.alpha:
        if mono.alpha[0] != f_edge.name:
            return None
        return Monomial(mono.alpha[1:], mono.beta, mono.anchor)
    if f_edge.src != mono.anchor:
        return None
    return Monomial((), mono.beta + (f_edge.name,), f_edge.tgt)


def left_act(generator: tuple[str, str], y: BridgeElement) -> BridgeElement:
    """Act by one generator of the left graph: ("v", name), ("e", name), or
    ("e*", name)."""
    ctx = BridgeActions(y.pair)
    kind, name = generator
    if kind == "v":
        out = ctx.act_vertex_raw(name, y.terms)
    elif kind == "e":
        out = ctx.act_edge_raw(name, y.terms)
    elif kind == "e*":
        out = ctx.act_ghost_raw(name, y.terms)
    else:
        raise BridgeError(f"unknown generator kind {kind!r}")
    return BridgeElement(y.pair, out)


def left_act_element(a: LpaElement, y: BridgeElement) -> BridgeElement:
    """Extend the generator actions over words and linear combinations."""
    ctx = BridgeActions(y.pair)
    return BridgeElement(y.pair, ctx.act_element_raw(a, y.terms))


def right_act(y: BridgeElement, s: LpaElement) -> BridgeElement:
    """Multiply the monomial parts on the right, then normalize."""
    if s.graph != y.pair.F:
        raise BridgeError("right factor is over the wrong graph")
    f = y.pair.F
    special = default_special_edges(f)
    raw: dict = {}
    for (m_name, mono), c in y.terms.items():
        for mono2, c2 in s.terms.items():
            prod = mono_product(f, mono, mono2)
            if prod is None:
                continue
            key = (m_name, prod)
            add = c * c2
            cur = raw.get(key)
            s_ = add if cur is None else cur + add
            if s_:
                raw[key] = s_
            elif cur is not None:
                del raw[key]
    return BridgeElement(y.pair, normalize_tagged(f, raw, special))


def degree_of(y: BridgeElement) -> int | None:
    """The common monomial degree, or None when mixed or zero."""
    degs = {mono.deg for (_, mono) in y.terms}
    if len(degs) != 1:
        return None
    return degs.pop()


def enumerate_basis(pair: ConjugacyPair, length_bound: int, degree_bound: int | None = None):
    """All (basis name, normal-form monomial) pairs with both path lengths
    bounded, and optionally the absolute degree bounded."""
    f = pair.F
    special = default_special_edges(f)
    by_name = edge_by_name(f)
    paths_by_start: dict = {}
    for v in f.vertices:
        acc = []
        for ln in range(length_bound + 1):
            acc.extend(paths_from(f, v, ln))
        paths_by_start[v] = acc
    # group candidate beta paths by their end vertex
    beta_by_end: dict = {}
    for v in f.vertices:
        for p in paths_by_start[v]:
            beta_by_end.setdefault(path_range(f, p, v), []).append(p)
    for b in pair.M.basis:
        for alpha in paths_by_start[b.tgt]:
            end = path_range(f, alpha, b.tgt)
            for beta in beta_by_end.get(end, ()):
                if (
                    alpha
                    and beta
                    and alpha[-1] == beta[-1]
                    and special.get(by_name[alpha[-1]].src) == alpha[-1]
                ):
                    continue  # not in normal form
                if degree_bound is not None and abs(len(alpha) - len(beta)) > degree_bound:
                    continue
                yield (b.name, Monomial(alpha, beta, end))


@dataclass
class CkReport:
    """Outcome of the relation check, with any counterexample elements."""

    passed: bool
    checked_elements: int
    counterexamples: list


def verify_ck_on_bridge(
    pair: ConjugacyPair,
    degree_bound: int,
    length_bound: int,
    max_counterexamples: int | None = None,
) -> CkReport:
    """Exactly evaluate the five defining relations of the left action on
    every bounded basis element, reporting any counterexamples.

    Both graphs must be sink-free.
    """
    for g, label in ((pair.E, "left"), (pair.F, "right")):
        bad = sinks(g)
        if bad:
            raise BridgeError(f"{label} graph has sinks {bad}")
    ctx = BridgeActions(pair)
    e_vertices = pair.E.vertices
    e_edges = pair.E.edges
    out_by_v = {v: tuple(e for e in e_edges if e.src == v) for v in e_vertices}
    counterexamples: list = []
    checked = 0

    def record(relation: str, gens, key):
        counterexamples.append(
            {
                "relation": relation,
                "generators": gens,
                "element": {"m": key[0], "alpha": list(key[1].alpha), "beta": list(key[1].beta)},
            }
        )

    def full() -> bool:
        return max_counterexamples is not None and len(counterexamples) >= max_counterexamples

    def dict_add(acc: dict, d: dict):
        for k, v in d.items():
            cur = acc.get(k)
            s = v if cur is None else cur + v
            if s:
                acc[k] = s
            elif cur is not None:
                del acc[k]

    for key in enumerate_basis(pair, length_bound, degree_bound):
        checked += 1
        one = ctx.pair.sigma.field.one
        z = {key: one}
        # vertex projections are orthogonal idempotents
        for v in e_vertices:
            pv = ctx.act_vertex_raw(v, z)
            for w in e_vertices:
                lhs = ctx.act_vertex_raw(v, ctx.act_vertex_raw(w, z))
                rhs = pv if v == w else {}
                if lhs != rhs:
                    record("vertex-orthogonality", (v, w), key)
                    if full():
                        return CkReport(False, checked, counterexamples)
        # edge and ghost actions absorb their end vertices
        for e in e_edges:
            se = ctx.act_edge_raw(e.name, z)
            if ctx.act_edge_raw(e.name, ctx.act_vertex_raw(e.tgt, z)) != se:
                record("edge-range-absorption", (e.name,), key)
                if full():
                    return CkReport(False, checked, counterexamples)
            if ctx.act_vertex_raw(e.src, se) != se:
                record("edge-source-absorption", (e.name,), key)
                if full():
                    return CkReport(False, checked, counterexamples)
            sg = ctx.act_ghost_raw(e.name, z)
            if ctx.act_ghost_raw(e.name, ctx.act_vertex_raw(e.src, z)) != sg:
                record("ghost-source-absorption", (e.name,), key)
                if full():
                    return CkReport(False, checked, counterexamples)
            if ctx.act_vertex_raw(e.tgt, sg) != sg:
                record("ghost-range-absorption", (e.name,), key)
                if full():
                    return CkReport(False, checked, counterexamples)
        # ghost-then-edge cancellation
        for e2 in e_edges:
            se2 = ctx.act_edge_raw(e2.name, z)
            for e in e_edges:
                lhs = ctx.act_ghost_raw(e.name, se2) if se2 else {}
                rhs = ctx.act_vertex_raw(e.tgt, z) if e.name == e2.name else {}
                if lhs != rhs:
                    record("ghost-edge-cancellation", (e.name, e2.name), key)
                    if full():
                        return CkReport(False, checked, counterexamples)
        # vertex resolution: summing edge-after-ghost over the out-edges
        for v in e_vertices:
            acc: dict = {}
            for e in out_by_v[v]:
                dict_add(acc, ctx.act_edge_raw(e.name, ctx.act_ghost_raw(e.name, z)))
            if acc != ctx.act_vertex_raw(v, z):
                record("vertex-resolution", (v,), key)
                if full():
                    return CkReport(False, checked, counterexamples)
    return CkReport(not counterexamples, checked, counterexamples)


def rho(e: Graph, m: int, z: BridgeElement) -> LpaElement:
    """Concatenate the tensor-word factors with the monomial and normalize.

    Defined on bridges over the m-fold edge power pair; the graph must be
    sink-free.
    """
    bad = sinks(e)
    if bad:
        raise LpaError(f"graph has sinks {bad}")
    if z.pair.E != e or z.pair.F != e or z.pair.M != edge_power_bimodule(e, m):
        raise BridgeError("element is not over the m-fold edge power pair")
    raw = []
    for (name, mono), c in z.terms.items():
        word = flatten_name(name, m)
        raw.append((Monomial(word + mono.alpha, mono.beta, mono.anchor), c))
    return normalize(e, raw, validate=False)


@dataclass(eq=True)
class PairTensorElement:
    """An element of the tensor of two bridges over the middle path algebra,
    stored in normal form: every term is (m tensor unit) tensor (n tensor T),
    recorded as (m name, n name, monomial over the right graph)."""

    left: ConjugacyPair
    right: ConjugacyPair
    terms: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms


def eta(p1: ConjugacyPair, p2: ConjugacyPair, z: BridgeElement) -> PairTensorElement:
    """Split a bridge element over the composed pair into the tensor of the
    two bridges: (m tensor n) tensor T goes to (m tensor unit) tensor (n tensor T)."""
    composite = hash_compose(p1, p2)
    if z.pair.M != composite.M or z.pair.E != composite.E or z.pair.F != composite.F:
        raise BridgeError("element is not over the composition of the two pairs")
    terms = {}
    for ((m_name, n_name), mono), c in z.terms.items():
        terms[(m_name, n_name, mono)] = c
    return PairTensorElement(p1, p2, terms)


def tau(p1: ConjugacyPair, p2: ConjugacyPair, zt: PairTensorElement) -> BridgeElement:
    """Inverse of the splitting: reassemble over the composed pair."""
    composite = hash_compose(p1, p2)
    terms = {}
    for (m_name, n_name, mono), c in zt.terms.items():
        terms[((m_name, n_name), mono)] = c
    return BridgeElement(composite, terms)


def pair_tensor_act(generator: tuple[str, str], p1: ConjugacyPair, p2: ConjugacyPair, zt: PairTensorElement) -> PairTensorElement:
    """Act by a generator of the left graph on the tensor of two bridges,
    returning the result in normal form.

    The generator acts on the left bridge factor; monomials that appear in
    the middle are pushed across the balanced tensor onto the right bridge.
    """
    ctx1 = BridgeActions(p1)
    ctx2 = BridgeActions(p2)
    kind, name = generator
    acc: dict = {}
    for (m_name, n_name, mono), c in zt.terms.items():
        left = {(m_name, vertex_monomial(ctx1.tgt_of[m_name])): ctx1.pair.sigma.field.one}
        if kind == "v":
            moved = ctx1.act_vertex_raw(name, left)
        elif kind == "e":
            moved = ctx1.act_edge_raw(name, left)
        elif kind == "e*":
            moved = ctx1.act_ghost_raw(name, left)
        else:
            raise BridgeError(f"unknown generator kind {kind!r}")
        for (m2, mid_mono), c1 in moved.items():
            pushed = ctx2.act_monomial_raw(mid_mono, {(n_name, mono): c * c1})
            for (n2, mono2), c2 in pushed.items():
                key = (m2, n2, mono2)
                cur = acc.get(key)
                s = c2 if cur is None else cur + c2
                if s:
                    acc[key] = s
                elif cur is not None:
                    del acc[key]
    return PairTensorElement(p1, p2, acc)


def psi_identity(e: Graph, z: BridgeElement) -> LpaElement:
    """Collapse a bridge element over the identity pair to a path-algebra
    element by absorbing the vertex factor."""
    if z.pair.E != e or z.pair.F != e:
        raise BridgeError("element is not over the identity pair of the graph")
    raw = []
    for (w, mono), c in z.terms.items():
        # the pairing constraint already forces the monomial to start at w
        raw.append((mono, c))
    return normalize(e, raw, validate=False)
