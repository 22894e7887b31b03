"""JSON codecs for the wire formats: graphs, matrices, witnesses, algebra
elements, bimodules, block maps, conjugacy pairs, and bridge elements.

JSON is the only interchange format; scalars travel as strings rendered by
the active field.
"""

from __future__ import annotations

from .fields import Rationals
from .graphs import Edge, Graph, GraphError, NonNegMatrix, Polymorphism, edge_by_name
from .lpa import LpaElement, LpaError, Monomial, normalize
from .shift_equiv import SEWitness, SSEStep
from .bimodules import (
    BasisVec,
    BlockMap,
    ConjugacyPair,
    PolyBimodule,
    basis_index,
    bimodule_of_polymorphism,
    tensor,
)
from .bridge import BridgeElement, bridge_element
from .com import ComWitness


class FormatError(ValueError):
    """Raised for malformed input documents."""


def _require(doc: dict, keys, what: str):
    for k in keys:
        if k not in doc:
            raise FormatError(f"{what} is missing field {k!r}")


# ---------- graphs and matrices ----------


def graph_to_json(g: Polymorphism) -> dict:
    doc = {
        "vertices": list(g.source_vertices),
        "edges": [{"name": e.name, "src": e.src, "tgt": e.tgt} for e in g.edges],
    }
    if g.source_vertices != g.target_vertices:
        doc["target_vertices"] = list(g.target_vertices)
    return doc


def graph_from_json(doc: dict) -> Polymorphism:
    _require(doc, ["vertices", "edges"], "graph document")
    try:
        edges = tuple(Edge(e["name"], e["src"], e["tgt"]) for e in doc["edges"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed edge list: {exc}") from exc
    src = tuple(doc["vertices"])
    tgt = tuple(doc.get("target_vertices", src))
    try:
        if src == tgt:
            return Graph(src, tgt, edges)
        return Polymorphism(src, tgt, edges)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


def matrix_to_json(m: NonNegMatrix) -> dict:
    return {"rows": list(m.rows), "cols": list(m.cols), "entries": [list(r) for r in m.entries]}


def matrix_from_json(doc: dict) -> NonNegMatrix:
    _require(doc, ["rows", "cols", "entries"], "matrix document")
    try:
        return NonNegMatrix(tuple(doc["rows"]), tuple(doc["cols"]), tuple(tuple(r) for r in doc["entries"]))
    except (GraphError, TypeError) as exc:
        raise FormatError(str(exc)) from exc


# ---------- shift equivalence ----------


def se_witness_to_json(w: SEWitness) -> dict:
    return {"R": matrix_to_json(w.R), "S": matrix_to_json(w.S), "n": w.lag}


def se_witness_from_json(doc: dict) -> SEWitness:
    _require(doc, ["R", "S", "n"], "witness document")
    try:
        return SEWitness(matrix_from_json(doc["R"]), matrix_from_json(doc["S"]), int(doc["n"]))
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


def sse_chain_to_json(steps) -> list:
    return [
        {"A": matrix_to_json(st.A), "R": matrix_to_json(st.R), "S": matrix_to_json(st.S)}
        for st in steps
    ]


def sse_chain_from_json(doc) -> tuple[SSEStep, ...]:
    if not isinstance(doc, list):
        raise FormatError("chain document must be a list of steps")
    out = []
    for st in doc:
        _require(st, ["A", "R", "S"], "chain step")
        out.append(
            SSEStep(matrix_from_json(st["A"]), matrix_from_json(st["R"]), matrix_from_json(st["S"]))
        )
    return tuple(out)


# ---------- path algebra elements ----------


def _path_to_json(g: Graph, path: tuple[str, ...], anchor: str) -> list:
    if not path:
        # a length-0 path is written as the singleton list of its vertex
        return [anchor]
    return list(path)


def _path_from_json(g: Graph, doc: list, what: str) -> tuple[tuple[str, ...], str | None]:
    """Return (edge names, anchor) with the anchor known only for empty paths."""
    if not isinstance(doc, list) or not doc:
        raise FormatError(f"{what} must be a nonempty list")
    names = edge_by_name(g)
    if len(doc) == 1 and doc[0] in g.vertices:
        if doc[0] in names:
            raise FormatError(f"name {doc[0]!r} is both a vertex and an edge; ambiguous path")
        return (), doc[0]
    for item in doc:
        if item not in names:
            raise FormatError(f"{what} mentions unknown edge {item!r}")
    return tuple(doc), None


def element_to_json(x: LpaElement, fld=Rationals) -> list:
    terms = sorted(
        x.terms.items(), key=lambda kv: (len(kv[0].alpha), len(kv[0].beta), kv[0].alpha, kv[0].beta, kv[0].anchor)
    )
    return [
        {
            "alpha": _path_to_json(x.graph, m.alpha, m.anchor),
            "beta": _path_to_json(x.graph, m.beta, m.anchor),
            "coeff": fld.format(c),
        }
        for m, c in terms
    ]


def element_from_json(g: Graph, doc: list, fld=Rationals) -> LpaElement:
    if not isinstance(doc, list):
        raise FormatError("element document must be a list of terms")
    names = edge_by_name(g)
    raw = []
    for term in doc:
        _require(term, ["alpha", "beta", "coeff"], "element term")
        alpha, a_anchor = _path_from_json(g, term["alpha"], "alpha")
        beta, b_anchor = _path_from_json(g, term["beta"], "beta")
        if alpha:
            a_anchor = names[alpha[-1]].tgt
        if beta:
            b_anchor = names[beta[-1]].tgt
        if a_anchor != b_anchor:
            raise FormatError(f"term paths end at {a_anchor!r} and {b_anchor!r}; must agree")
        raw.append((Monomial(alpha, beta, a_anchor), fld.parse(term["coeff"])))
    try:
        return normalize(g, raw)
    except LpaError as exc:
        raise FormatError(str(exc)) from exc


# ---------- bimodules and block maps ----------


def _name_to_json(name):
    if isinstance(name, str):
        return name
    return [_name_to_json(x) for x in name]


def _name_from_json(doc):
    if isinstance(doc, str):
        return doc
    if isinstance(doc, list):
        return tuple(_name_from_json(x) for x in doc)
    raise FormatError(f"bad basis name {doc!r}")


def bimodule_to_json(m: PolyBimodule) -> dict:
    return {
        "left_vertices": list(m.left_vertices),
        "right_vertices": list(m.right_vertices),
        "basis": [{"name": _name_to_json(b.name), "src": b.src, "tgt": b.tgt} for b in m.basis],
    }


def bimodule_from_json(doc: dict) -> PolyBimodule:
    _require(doc, ["left_vertices", "right_vertices", "basis"], "bimodule document")
    basis = tuple(
        BasisVec(_name_from_json(b["name"]), b["src"], b["tgt"]) for b in doc["basis"]
    )
    return PolyBimodule(tuple(doc["left_vertices"]), tuple(doc["right_vertices"]), basis)


def block_map_to_json(f: BlockMap, fld=Rationals) -> dict:
    """Blocks keyed "(v,w)", each a dense matrix over the block's basis
    vectors in domain/codomain order."""
    dom_blocks: dict = {}
    for j, b in enumerate(f.domain.basis):
        dom_blocks.setdefault((b.src, b.tgt), []).append(j)
    cod_blocks: dict = {}
    for i, b in enumerate(f.codomain.basis):
        cod_blocks.setdefault((b.src, b.tgt), []).append(i)
    blocks = {}
    for key in sorted(set(dom_blocks) | set(cod_blocks)):
        djs = dom_blocks.get(key, [])
        cis = cod_blocks.get(key, [])
        if not djs or not cis:
            continue
        blocks[f"({key[0]},{key[1]})"] = [
            [fld.format(f.matrix.get((i, j), fld.zero)) for j in djs] for i in cis
        ]
    return {"blocks": blocks}


def block_map_from_json(doc: dict, dom: PolyBimodule, cod: PolyBimodule, fld=Rationals) -> BlockMap:
    _require(doc, ["blocks"], "block map document")
    dom_blocks: dict = {}
    for j, b in enumerate(dom.basis):
        dom_blocks.setdefault((b.src, b.tgt), []).append(j)
    cod_blocks: dict = {}
    for i, b in enumerate(cod.basis):
        cod_blocks.setdefault((b.src, b.tgt), []).append(i)
    matrix: dict = {}
    for label, rows in doc["blocks"].items():
        if not (label.startswith("(") and label.endswith(")") and "," in label):
            raise FormatError(f"bad block label {label!r}")
        v, w = label[1:-1].split(",", 1)
        djs = dom_blocks.get((v, w))
        cis = cod_blocks.get((v, w))
        if djs is None or cis is None:
            raise FormatError(f"block {label} does not exist for these bimodules")
        if len(rows) != len(cis) or any(len(r) != len(djs) for r in rows):
            raise FormatError(f"block {label} has the wrong shape")
        for a, i in enumerate(cis):
            for b, j in enumerate(djs):
                c = fld.parse(rows[a][b])
                if c:
                    matrix[(i, j)] = c
    return BlockMap(dom, cod, matrix, fld)


def pair_to_json(p: ConjugacyPair, fld=Rationals) -> dict:
    return {
        "E": graph_to_json(p.E),
        "F": graph_to_json(p.F),
        "M": bimodule_to_json(p.M),
        "sigma": block_map_to_json(p.sigma, fld),
    }


def pair_from_json(doc: dict, fld=Rationals) -> ConjugacyPair:
    _require(doc, ["E", "F", "M", "sigma"], "conjugacy pair document")
    e = graph_from_json(doc["E"])
    f = graph_from_json(doc["F"])
    if not isinstance(e, Graph) or not isinstance(f, Graph):
        raise FormatError("conjugacy pair requires graphs, not polymorphisms")
    m = bimodule_from_json(doc["M"])
    dom = tensor(bimodule_of_polymorphism(e), m)
    cod = tensor(m, bimodule_of_polymorphism(f))
    sigma = block_map_from_json(doc["sigma"], dom, cod, fld)
    return ConjugacyPair(e, f, m, sigma)


# ---------- bridge elements ----------


def bridge_element_to_json(y: BridgeElement, fld=Rationals) -> list:
    terms = sorted(
        y.terms.items(),
        key=lambda kv: (
            _name_to_json(kv[0][0]).__repr__(),
            len(kv[0][1].alpha),
            len(kv[0][1].beta),
            kv[0][1].alpha,
            kv[0][1].beta,
        ),
    )
    g = y.pair.F
    return [
        {
            "m": _name_to_json(name),
            "alpha": _path_to_json(g, mono.alpha, mono.anchor),
            "beta": _path_to_json(g, mono.beta, mono.anchor),
            "coeff": fld.format(c),
        }
        for (name, mono), c in terms
    ]


def bridge_element_from_json(pair: ConjugacyPair, doc: list, fld=Rationals) -> BridgeElement:
    if not isinstance(doc, list):
        raise FormatError("bridge element document must be a list of terms")
    g = pair.F
    names = edge_by_name(g)
    raw = []
    for term in doc:
        _require(term, ["m", "alpha", "beta", "coeff"], "bridge element term")
        alpha, a_anchor = _path_from_json(g, term["alpha"], "alpha")
        beta, b_anchor = _path_from_json(g, term["beta"], "beta")
        if alpha:
            a_anchor = names[alpha[-1]].tgt
        if beta:
            b_anchor = names[beta[-1]].tgt
        if a_anchor != b_anchor:
            raise FormatError(f"term paths end at {a_anchor!r} and {b_anchor!r}; must agree")
        raw.append((_name_from_json(term["m"]), Monomial(alpha, beta, a_anchor), fld.parse(term["coeff"])))
    return bridge_element(pair, raw)


# ---------- com witnesses ----------


def com_witness_to_json(w: ComWitness, fld=Rationals) -> dict:
    return {
        "E": graph_to_json(w.E),
        "F": graph_to_json(w.F),
        "M": bimodule_to_json(w.M),
        "N": bimodule_to_json(w.N),
        "n": w.lag,
        "omega_E": block_map_to_json(w.omega_E, fld),
        "omega_F": block_map_to_json(w.omega_F, fld),
        "sigma_M": block_map_to_json(w.sigma_M, fld),
        "sigma_N": block_map_to_json(w.sigma_N, fld),
    }


def com_witness_from_json(doc: dict, fld=Rationals) -> ComWitness:
    from .bimodules import edge_power_bimodule

    _require(
        doc, ["E", "F", "M", "N", "n", "omega_E", "omega_F", "sigma_M", "sigma_N"], "witness document"
    )
    e = graph_from_json(doc["E"])
    f = graph_from_json(doc["F"])
    if not isinstance(e, Graph) or not isinstance(f, Graph):
        raise FormatError("witness requires graphs, not polymorphisms")
    m = bimodule_from_json(doc["M"])
    n = bimodule_from_json(doc["N"])
    lag = int(doc["n"])
    if lag < 1:
        raise FormatError("witness lag must be positive")
    ke1 = bimodule_of_polymorphism(e)
    kf1 = bimodule_of_polymorphism(f)
    return ComWitness(
        e,
        f,
        m,
        n,
        lag,
        block_map_from_json(doc["omega_E"], tensor(m, n), edge_power_bimodule(e, lag), fld),
        block_map_from_json(doc["omega_F"], tensor(n, m), edge_power_bimodule(f, lag), fld),
        block_map_from_json(doc["sigma_M"], tensor(ke1, m), tensor(m, kf1), fld),
        block_map_from_json(doc["sigma_N"], tensor(kf1, n), tensor(n, ke1), fld),
    )
