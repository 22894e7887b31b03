"""Finite-dimensional bimodules with distinguished bases, and block-structured
exact linear maps between them.

A bimodule here is spanned by basis vectors carrying a source vertex (left
action) and a target vertex (right action); a map between two such
bimodules is stored as a sparse matrix that may only connect basis vectors
with equal source and target (the block structure).  Tensor products pair
basis vectors whose middle vertices match; tensor bases stay
left-associated, and every re-association is an explicit permutation map,
never a silent identification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .fields import Rationals
from .graphs import Graph, GraphError, NonNegMatrix, Polymorphism, adjacency
from .shift_equiv import SEWitness, verify_se


class BimoduleError(ValueError):
    """Raised for malformed maps or incompatible shapes."""


class BasisVec(NamedTuple):
    name: object  # str, or nested pairs of names for tensor factors
    src: str
    tgt: str


@dataclass(frozen=True)
class PolyBimodule:
    """A bimodule with a distinguished basis of (name, src, tgt) vectors."""

    left_vertices: tuple[str, ...]
    right_vertices: tuple[str, ...]
    basis: tuple[BasisVec, ...]

    def __post_init__(self):
        object.__setattr__(self, "left_vertices", tuple(self.left_vertices))
        object.__setattr__(self, "right_vertices", tuple(self.right_vertices))
        object.__setattr__(self, "basis", tuple(BasisVec(*b) for b in self.basis))
        lv, rv = set(self.left_vertices), set(self.right_vertices)
        names = set()
        for b in self.basis:
            if b.src not in lv or b.tgt not in rv:
                raise BimoduleError(f"basis vector {b} outside the vertex sets")
            if b.name in names:
                raise BimoduleError(f"duplicate basis name {b.name!r}")
            names.add(b.name)

    @property
    def dim(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def basis_index(m: PolyBimodule) -> dict:
    return {b.name: i for i, b in enumerate(m.basis)}


@dataclass(eq=True)
class BlockMap:
    """An exact linear map between two bimodules, sparse over basis pairs.

    ``matrix`` maps (codomain index, domain index) to a nonzero scalar;
    entries may only connect basis vectors with matching src and tgt.
    Treat instances as immutable.
    """

    domain: PolyBimodule
    codomain: PolyBimodule
    matrix: dict
    field: object = Rationals

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.matrix.items():
            if not c:
                continue
            cb = self.codomain.basis[i]
            db = self.domain.basis[j]
            if cb.src != db.src or cb.tgt != db.tgt:
                raise BimoduleError(
                    f"entry ({cb.name!r}, {db.name!r}) crosses blocks "
                    f"({cb.src},{cb.tgt}) vs ({db.src},{db.tgt})"
                )
            clean[(i, j)] = c
        self.matrix = clean


def identity_map(m: PolyBimodule, fld=Rationals) -> BlockMap:
    return BlockMap(m, m, {(i, i): fld.one for i in range(m.dim)}, fld)


def zero_map(dom: PolyBimodule, cod: PolyBimodule, fld=Rationals) -> BlockMap:
    return BlockMap(dom, cod, {}, fld)


def compose(g: BlockMap, f: BlockMap) -> BlockMap:
    """g after f."""
    if f.codomain != g.domain:
        raise BimoduleError("compose: codomain of the first map must equal the domain of the second")
    by_mid: dict = {}
    for (i, k), gv in g.matrix.items():
        by_mid.setdefault(k, []).append((i, gv))
    out: dict = {}
    for (k, j), fv in f.matrix.items():
        for i, gv in by_mid.get(k, ()):
            key = (i, j)
            c = gv * fv
            cur = out.get(key)
            s = c if cur is None else cur + c
            if s:
                out[key] = s
            elif cur is not None:
                del out[key]
    return BlockMap(f.domain, g.codomain, out, g.field)


def apply_map(f: BlockMap, vec: dict) -> dict:
    """Apply to a sparse vector over domain indices."""
    out: dict = {}
    for j, c in vec.items():
        for (i, j2), v in f.matrix.items():
            if j2 != j:
                continue
            cur = out.get(i)
            s = v * c if cur is None else cur + v * c
            if s:
                out[i] = s
            elif cur is not None:
                del out[i]
    return out


def column(f: BlockMap, j: int) -> dict:
    return {i: v for (i, j2), v in f.matrix.items() if j2 == j}


def _invert_dense(rows: list[list], fld):
    n = len(rows)
    zero, one = fld.zero, fld.one
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r == col or not aug[r][col]:
                continue
            factor = aug[r][col]
            aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def invert(f: BlockMap) -> BlockMap | None:
    """Exact inverse computed block by block, or None when singular."""
    dom_blocks: dict = {}
    for j, b in enumerate(f.domain.basis):
        dom_blocks.setdefault((b.src, b.tgt), []).append(j)
    cod_blocks: dict = {}
    for i, b in enumerate(f.codomain.basis):
        cod_blocks.setdefault((b.src, b.tgt), []).append(i)
    if set(dom_blocks) != set(cod_blocks):
        return None
    fld = f.field
    out: dict = {}
    for key, djs in dom_blocks.items():
        cis = cod_blocks[key]
        if len(cis) != len(djs):
            return None
        dense = [[f.matrix.get((i, j), fld.zero) for j in djs] for i in cis]
        inv = _invert_dense(dense, fld)
        if inv is None:
            return None
        for a, j in enumerate(djs):
            for b, i in enumerate(cis):
                v = inv[a][b]
                if v:
                    out[(j, i)] = v
    return BlockMap(f.codomain, f.domain, out, fld)


def is_invertible(f: BlockMap) -> bool:
    return invert(f) is not None


def dim_matrix(m: PolyBimodule) -> NonNegMatrix:
    """Entry (v, w) counts basis vectors with src v and tgt w."""
    ri = {v: i for i, v in enumerate(m.left_vertices)}
    ci = {w: j for j, w in enumerate(m.right_vertices)}
    counts = [[0] * len(m.right_vertices) for _ in m.left_vertices]
    for b in m.basis:
        counts[ri[b.src]][ci[b.tgt]] += 1
    return NonNegMatrix(m.left_vertices, m.right_vertices, tuple(tuple(r) for r in counts))


def bimodule_of_polymorphism(p: Polymorphism) -> PolyBimodule:
    """The vector space on the edges, with source/target vertex actions."""
    return PolyBimodule(
        p.source_vertices,
        p.target_vertices,
        tuple(BasisVec(e.name, e.src, e.tgt) for e in p.edges),
    )


def _render_name(name) -> str:
    if isinstance(name, str):
        return name
    return "(" + ",".join(_render_name(x) for x in name) + ")"


def polymorphism_of_bimodule(m: PolyBimodule) -> Polymorphism:
    """The edge system with one edge per basis vector (names stringified)."""
    from .graphs import Edge

    edges = tuple(Edge(_render_name(b.name), b.src, b.tgt) for b in m.basis)
    if m.left_vertices == m.right_vertices:
        return Graph(m.left_vertices, m.right_vertices, edges)
    return Polymorphism(m.left_vertices, m.right_vertices, edges)


@lru_cache(maxsize=None)
def tensor(m: PolyBimodule, n: PolyBimodule) -> PolyBimodule:
    """Basis pairs (x, y) with tgt(x) = src(y), ordered left factor major."""
    if m.right_vertices != n.left_vertices:
        raise BimoduleError("tensor: middle vertex sets do not match")
    basis = tuple(
        BasisVec((x.name, y.name), x.src, y.tgt)
        for x in m.basis
        for y in n.basis
        if x.tgt == y.src
    )
    return PolyBimodule(m.left_vertices, n.right_vertices, basis)


def tensor_maps(f: BlockMap, g: BlockMap) -> BlockMap:
    """The map f(x) tensor g(y) on the paired bases."""
    dom = tensor(f.domain, g.domain)
    cod = tensor(f.codomain, g.codomain)
    dom_idx = basis_index(dom)
    cod_idx = basis_index(cod)
    fd, gd = f.domain.basis, g.domain.basis
    fc, gc = f.codomain.basis, g.codomain.basis
    out: dict = {}
    for (i1, j1), fv in f.matrix.items():
        for (i2, j2), gv in g.matrix.items():
            dkey = (fd[j1].name, gd[j2].name)
            j = dom_idx.get(dkey)
            if j is None:
                continue
            ckey = (fc[i1].name, gc[i2].name)
            i = cod_idx.get(ckey)
            if i is None:
                continue
            out[(i, j)] = fv * gv
    return BlockMap(dom, cod, out, f.field)


def rebracket(x: PolyBimodule, y: PolyBimodule, z: PolyBimodule, fld=Rationals) -> BlockMap:
    """The basis bijection ((x, y), z) to (x, (y, z)) as an explicit map."""
    dom = tensor(tensor(x, y), z)
    cod = tensor(x, tensor(y, z))
    cod_idx = basis_index(cod)
    out: dict = {}
    for j, b in enumerate(dom.basis):
        (xn, yn), zn = b.name
        out[(cod_idx[(xn, (yn, zn))], j)] = fld.one
    return BlockMap(dom, cod, out, fld)


def flatten_name(name, factors: int) -> tuple:
    """Unfold a left-associated tensor basis name into its factor names."""
    if factors == 1:
        return (name,)
    return flatten_name(name[0], factors - 1) + (name[1],)


def nest_name(names: tuple):
    """Fold factor names into the left-associated tensor basis name."""
    if len(names) == 1:
        return names[0]
    return (nest_name(names[:-1]), names[-1])


@lru_cache(maxsize=None)
def edge_power_bimodule(g: Graph, n: int) -> PolyBimodule:
    """The n-fold left-associated tensor power of the edge bimodule."""
    if n < 1:
        raise BimoduleError("tensor power requires n >= 1")
    m = bimodule_of_polymorphism(g)
    out = m
    for _ in range(n - 1):
        out = tensor(out, m)
    return out


def canonical_block_bijection(dom: PolyBimodule, cod: PolyBimodule, fld=Rationals) -> BlockMap:
    """Pair the i-th domain basis vector of each (src, tgt) block, in name
    order, with the i-th codomain basis vector of the same block."""
    dom_blocks: dict = {}
    for j, b in enumerate(dom.basis):
        dom_blocks.setdefault((b.src, b.tgt), []).append((b.name, j))
    cod_blocks: dict = {}
    for i, b in enumerate(cod.basis):
        cod_blocks.setdefault((b.src, b.tgt), []).append((b.name, i))
    if set(dom_blocks) != set(cod_blocks) or any(
        len(dom_blocks[k]) != len(cod_blocks[k]) for k in dom_blocks
    ):
        raise BimoduleError("canonical bijection requires equal block dimensions")
    out: dict = {}
    for key, dvs in dom_blocks.items():
        for (_, j), (_, i) in zip(sorted(dvs), sorted(cod_blocks[key])):
            out[(i, j)] = fld.one
    return BlockMap(dom, cod, out, fld)


@dataclass(eq=True)
class ConjugacyPair:
    """A bimodule together with a chosen block isomorphism from
    edges-tensor-module to module-tensor-edges."""

    E: Graph
    F: Graph
    M: PolyBimodule
    sigma: BlockMap


def verify_conjugacy(pair: ConjugacyPair) -> bool:
    """True iff sigma has the required domain and codomain and is invertible."""
    expected_dom = tensor(bimodule_of_polymorphism(pair.E), pair.M)
    expected_cod = tensor(pair.M, bimodule_of_polymorphism(pair.F))
    if pair.sigma.domain != expected_dom or pair.sigma.codomain != expected_cod:
        return False
    return is_invertible(pair.sigma)


def epsilon(g: Graph, fld=Rationals) -> ConjugacyPair:
    """The identity pair on a graph: the vertex bimodule with the map
    sending e tensor r(e) to s(e) tensor e."""
    m = PolyBimodule(g.vertices, g.vertices, tuple(BasisVec(v, v, v) for v in g.vertices))
    dom = tensor(bimodule_of_polymorphism(g), m)
    cod = tensor(m, bimodule_of_polymorphism(g))
    cod_idx = basis_index(cod)
    out: dict = {}
    for j, b in enumerate(dom.basis):
        e_name, v = b.name  # v = r(e) by the tensor pairing
        out[(cod_idx[(b.src, e_name)], j)] = fld.one
    return ConjugacyPair(g, g, m, BlockMap(dom, cod, out, fld))


def nu(g: Graph, m: int, fld=Rationals) -> BlockMap:
    """The re-bracketing bijection moving the leading edge factor of
    edges tensor (m-fold power) across to (m-fold power) tensor edges."""
    if m < 1:
        raise BimoduleError("nu requires m >= 1")
    e1 = bimodule_of_polymorphism(g)
    pw = edge_power_bimodule(g, m)
    dom = tensor(e1, pw)
    cod = tensor(pw, e1)
    cod_idx = basis_index(cod)
    out: dict = {}
    for j, b in enumerate(dom.basis):
        x, rest = b.name
        flat = (x,) + flatten_name(rest, m)
        out[(cod_idx[(nest_name(flat[:-1]), flat[-1])], j)] = fld.one
    return BlockMap(dom, cod, out, fld)


def nu_pair(g: Graph, m: int, fld=Rationals) -> ConjugacyPair:
    """The tensor power of the edge bimodule with its re-bracketing map."""
    return ConjugacyPair(g, g, edge_power_bimodule(g, m), nu(g, m, fld))


def hash_compose(p1: ConjugacyPair, p2: ConjugacyPair) -> ConjugacyPair:
    """Compose two pairs along a common middle graph.

    The underlying bimodule is the tensor product; the map is the five-fold
    composition of the two sigmas with explicit re-bracketings.
    """
    if p1.F != p2.E:
        raise GraphError("hash composition requires matching middle graphs")
    fld = p1.sigma.field
    ke1 = bimodule_of_polymorphism(p1.E)
    kg1 = bimodule_of_polymorphism(p2.F)
    m, n = p1.M, p2.M
    a1 = invert(rebracket(ke1, m, n, fld))
    s1 = tensor_maps(p1.sigma, identity_map(n, fld))
    a2 = rebracket(m, bimodule_of_polymorphism(p1.F), n, fld)
    s2 = tensor_maps(identity_map(m, fld), p2.sigma)
    a3 = invert(rebracket(m, n, kg1, fld))
    sig = compose(a3, compose(s2, compose(a2, compose(s1, a1))))
    return ConjugacyPair(p1.E, p2.F, tensor(m, n), sig)


def verify_pair_equivalence(p1: ConjugacyPair, p2: ConjugacyPair, phi: BlockMap) -> bool:
    """True iff phi is an invertible block map intertwining the two sigmas."""
    if p1.E != p2.E or p1.F != p2.F:
        raise GraphError("pair equivalence requires pairs between the same graphs")
    if phi.domain != p1.M or phi.codomain != p2.M:
        raise BimoduleError("phi must map the first bimodule to the second")
    if not is_invertible(phi):
        return False
    fld = phi.field
    ke1 = bimodule_of_polymorphism(p1.E)
    kf1 = bimodule_of_polymorphism(p1.F)
    lhs = compose(tensor_maps(phi, identity_map(kf1, fld)), p1.sigma)
    rhs = compose(p2.sigma, tensor_maps(identity_map(ke1, fld), phi))
    return lhs == rhs


class MseMaps(NamedTuple):
    """Explicit bimodule isomorphisms realizing a shift-equivalence witness."""

    M: PolyBimodule
    N: PolyBimodule
    power_iso_E: BlockMap  # M tensor N  ->  n-th power of the E edge bimodule
    power_iso_F: BlockMap  # N tensor M  ->  n-th power of the F edge bimodule
    step_iso_E: BlockMap  # edges(E) tensor M  ->  M tensor edges(F)
    step_iso_F: BlockMap  # edges(F) tensor N  ->  N tensor edges(E)


def mse_from_se(e: Graph, f: Graph, w: SEWitness, fld=Rationals) -> MseMaps:
    """Realize a verified matrix witness as four canonical bimodule
    isomorphisms built from block bijections of product bases."""
    from .graphs import polymorphism_from_matrix

    if w.R.rows != e.vertices or w.R.cols != f.vertices:
        raise GraphError("witness R is not indexed by the two vertex sets")
    if not verify_se(adjacency(e), adjacency(f), w):
        raise GraphError("witness fails the shift-equivalence equations")
    g = polymorphism_from_matrix(w.R)
    h = polymorphism_from_matrix(w.S)
    m = bimodule_of_polymorphism(g)
    n = bimodule_of_polymorphism(h)
    ke1 = bimodule_of_polymorphism(e)
    kf1 = bimodule_of_polymorphism(f)
    return MseMaps(
        M=m,
        N=n,
        power_iso_E=canonical_block_bijection(tensor(m, n), edge_power_bimodule(e, w.lag), fld),
        power_iso_F=canonical_block_bijection(tensor(n, m), edge_power_bimodule(f, w.lag), fld),
        step_iso_E=canonical_block_bijection(tensor(ke1, m), tensor(m, kf1), fld),
        step_iso_F=canonical_block_bijection(tensor(kf1, n), tensor(n, ke1), fld),
    )
