"""The commuting-diagram strengthening of shift equivalence at the bimodule
level: a witness bundles two module factors, two tensor-power isomorphisms,
and two step isomorphisms, and verification checks that the two
re-bracketing diagrams commute as exact block-matrix identities.

Witnesses are constructed from elementary strong shift equivalences, and
witnesses along a chain compose by tensoring the module factors and
concatenating the diagrams (the lags add).
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import Rationals
from .graphs import Graph, adjacency, polymorphism_from_matrix, sinks
from .shift_equiv import verify_elementary_sse
from .bimodules import (
    BlockMap,
    ConjugacyPair,
    PolyBimodule,
    basis_index,
    bimodule_of_polymorphism,
    canonical_block_bijection,
    compose,
    edge_power_bimodule,
    flatten_name,
    hash_compose,
    identity_map,
    invert,
    is_invertible,
    nest_name,
    nu,
    rebracket,
    tensor,
    tensor_maps,
)


class ComError(ValueError):
    """Raised for malformed witnesses or incompatible compositions."""


@dataclass(eq=True)
class ComWitness:
    """Shift-equivalence data at the bimodule level, with the four chosen
    isomorphisms subject to the two commutation diagrams."""

    E: Graph
    F: Graph
    M: PolyBimodule  # over (E vertices, F vertices)
    N: PolyBimodule  # over (F vertices, E vertices)
    lag: int
    omega_E: BlockMap  # M tensor N  ->  lag-th power of edges(E)
    omega_F: BlockMap  # N tensor M  ->  lag-th power of edges(F)
    sigma_M: BlockMap  # edges(E) tensor M  ->  M tensor edges(F)
    sigma_N: BlockMap  # edges(F) tensor N  ->  N tensor edges(E)


def _check_shapes(w: ComWitness):
    ke1 = bimodule_of_polymorphism(w.E)
    kf1 = bimodule_of_polymorphism(w.F)
    expects = [
        (w.omega_E, tensor(w.M, w.N), edge_power_bimodule(w.E, w.lag), "omega_E"),
        (w.omega_F, tensor(w.N, w.M), edge_power_bimodule(w.F, w.lag), "omega_F"),
        (w.sigma_M, tensor(ke1, w.M), tensor(w.M, kf1), "sigma_M"),
        (w.sigma_N, tensor(kf1, w.N), tensor(w.N, ke1), "sigma_N"),
    ]
    for bm, dom, cod, label in expects:
        if bm.domain != dom or bm.codomain != cod:
            raise ComError(f"{label} has the wrong domain or codomain")


def com_report(w: ComWitness) -> tuple[bool, list]:
    """Check the witness; on failure name the offending map or the first
    basis vector where a diagram fails."""
    for g, label in ((w.E, "E"), (w.F, "F")):
        bad = sinks(g)
        if bad:
            raise ComError(f"graph {label} has sinks {bad}")
    _check_shapes(w)
    failures: list = []
    for label, bm in (
        ("omega_E", w.omega_E),
        ("omega_F", w.omega_F),
        ("sigma_M", w.sigma_M),
        ("sigma_N", w.sigma_N),
    ):
        if not is_invertible(bm):
            failures.append({"kind": "not-invertible", "map": label})
    if failures:
        return False, failures
    fld = w.omega_E.field
    ke1 = bimodule_of_polymorphism(w.E)
    kf1 = bimodule_of_polymorphism(w.F)
    pair_m = ConjugacyPair(w.E, w.F, w.M, w.sigma_M)
    pair_n = ConjugacyPair(w.F, w.E, w.N, w.sigma_N)
    hash_mn = hash_compose(pair_m, pair_n).sigma
    hash_nm = hash_compose(pair_n, pair_m).sigma
    diagrams = [
        ("E", ke1, w.omega_E, nu(w.E, w.lag, fld), hash_mn),
        ("F", kf1, w.omega_F, nu(w.F, w.lag, fld), hash_nm),
    ]
    for label, edge_bim, omega, nu_map, hashed in diagrams:
        lhs = compose(nu_map, tensor_maps(identity_map(edge_bim, fld), omega))
        rhs = compose(tensor_maps(omega, identity_map(edge_bim, fld)), hashed)
        if lhs != rhs:
            dom = lhs.domain
            col = next(
                (
                    j
                    for j in range(dom.dim)
                    if {i: v for (i, j2), v in lhs.matrix.items() if j2 == j}
                    != {i: v for (i, j2), v in rhs.matrix.items() if j2 == j}
                ),
                None,
            )
            failures.append(
                {
                    "kind": "diagram-mismatch",
                    "graph": label,
                    "basis": None if col is None else repr(dom.basis[col].name),
                }
            )
    return not failures, failures


def verify_com(w: ComWitness) -> bool:
    """True iff all four maps are invertible block maps of the right shapes
    and both commutation diagrams hold exactly."""
    ok, _ = com_report(w)
    return ok


def com_from_elementary_sse(e: Graph, f: Graph, r, s, fld=Rationals) -> ComWitness:
    """Build a lag-1 witness from an elementary factorization of the two
    adjacency matrices: the module factors are the edge bimodules of the
    factor polymorphisms, the power isomorphisms are the canonical block
    bijections, and the step isomorphisms are derived from them."""
    for g, label in ((e, "E"), (f, "F")):
        bad = sinks(g)
        if bad:
            raise ComError(f"graph {label} has sinks {bad}")
    if r.rows != e.vertices or r.cols != f.vertices:
        raise ComError("R is not indexed by the two vertex sets")
    if not verify_elementary_sse(adjacency(e), adjacency(f), r, s):
        raise ComError("R, S do not factor the adjacency matrices")
    g_poly = polymorphism_from_matrix(r)
    h_poly = polymorphism_from_matrix(s)
    m = bimodule_of_polymorphism(g_poly)
    n = bimodule_of_polymorphism(h_poly)
    ke1 = bimodule_of_polymorphism(e)
    kf1 = bimodule_of_polymorphism(f)
    omega_e = canonical_block_bijection(tensor(m, n), ke1, fld)
    omega_f = canonical_block_bijection(tensor(n, m), kf1, fld)
    sigma_m = compose(
        tensor_maps(identity_map(m, fld), omega_f),
        compose(rebracket(m, n, m, fld), tensor_maps(invert(omega_e), identity_map(m, fld))),
    )
    sigma_n = compose(
        tensor_maps(identity_map(n, fld), omega_e),
        compose(rebracket(n, m, n, fld), tensor_maps(invert(omega_f), identity_map(n, fld))),
    )
    return ComWitness(e, f, m, n, 1, omega_e, omega_f, sigma_m, sigma_n)


def _merge_powers(g: Graph, n1: int, n2: int, fld=Rationals) -> BlockMap:
    """Re-associate (n1-fold power) tensor (n2-fold power) into the
    left-associated (n1 + n2)-fold power."""
    dom = tensor(edge_power_bimodule(g, n1), edge_power_bimodule(g, n2))
    cod = edge_power_bimodule(g, n1 + n2)
    cod_idx = basis_index(cod)
    out: dict = {}
    for j, b in enumerate(dom.basis):
        p, q = b.name
        flat = flatten_name(p, n1) + flatten_name(q, n2)
        out[(cod_idx[nest_name(flat)], j)] = fld.one
    return BlockMap(dom, cod, out, fld)


def _shuttle(mid: Graph, n: int, x: PolyBimodule, other: Graph, sig: BlockMap, fld) -> BlockMap:
    """Carry a module factor leftward across an n-fold edge power one edge
    at a time: (power n of mid edges) tensor X  ->  X tensor (power n of
    the other graph's edges), where sig moves a single edge factor."""
    kmid = bimodule_of_polymorphism(mid)
    kother = bimodule_of_polymorphism(other)
    if sig.domain != tensor(kmid, x) or sig.codomain != tensor(x, kother):
        raise ComError("shuttle map has the wrong shape")
    if n == 1:
        return sig
    prev = _shuttle(mid, n - 1, x, other, sig, fld)
    pw_mid = edge_power_bimodule(mid, n - 1)
    pw_other = edge_power_bimodule(other, n - 1)
    step1 = rebracket(pw_mid, kmid, x, fld)
    step2 = tensor_maps(identity_map(pw_mid, fld), sig)
    step3 = invert(rebracket(pw_mid, x, kother, fld))
    step4 = tensor_maps(prev, identity_map(kother, fld))
    step5 = rebracket(x, pw_other, kother, fld)
    return compose(step5, compose(step4, compose(step3, compose(step2, step1))))


def chain_com(w1: ComWitness, w2: ComWitness, fld=Rationals) -> ComWitness:
    """Compose witnesses along a common middle graph.

    Requires equal lags; the composite witness has the summed lag, module
    factors tensored in chain order, and step isomorphisms given by the
    hash composition of the two steps.
    """
    if w1.F != w2.E:
        raise ComError("chain composition requires matching middle graphs")
    if w1.lag != w2.lag:
        raise ComError("chain composition requires equal lags")
    n1, n2 = w1.lag, w2.lag
    e, f, g = w1.E, w1.F, w2.F
    m1, n1_mod, m2, n2_mod = w1.M, w1.N, w2.M, w2.N

    sigma_m = hash_compose(
        ConjugacyPair(e, f, m1, w1.sigma_M), ConjugacyPair(f, g, m2, w2.sigma_M)
    ).sigma
    sigma_n = hash_compose(
        ConjugacyPair(g, f, n2_mod, w2.sigma_N), ConjugacyPair(f, e, n1_mod, w1.sigma_N)
    ).sigma

    big_n = tensor(n2_mod, n1_mod)
    # omega on the E side: walk M1 M2 N2 N1 down to the (n1+n2)-power of E edges
    a = rebracket(m1, m2, big_n, fld)
    b = tensor_maps(identity_map(m1, fld), invert(rebracket(m2, n2_mod, n1_mod, fld)))
    c = tensor_maps(
        identity_map(m1, fld), tensor_maps(w2.omega_E, identity_map(n1_mod, fld))
    )
    shuttled_n1 = _shuttle(f, n2, n1_mod, e, w1.sigma_N, fld)
    d = tensor_maps(identity_map(m1, fld), shuttled_n1)
    pw_e2 = edge_power_bimodule(e, n2)
    e_step = invert(rebracket(m1, n1_mod, pw_e2, fld))
    f_step = tensor_maps(w1.omega_E, identity_map(pw_e2, fld))
    g_step = _merge_powers(e, n1, n2, fld)
    omega_e = compose(
        g_step, compose(f_step, compose(e_step, compose(d, compose(c, compose(b, a)))))
    )

    big_m = tensor(m1, m2)
    # omega on the G side: walk N2 N1 M1 M2 down to the (n1+n2)-power of G edges
    a2 = rebracket(n2_mod, n1_mod, big_m, fld)
    b2 = tensor_maps(identity_map(n2_mod, fld), invert(rebracket(n1_mod, m1, m2, fld)))
    c2 = tensor_maps(
        identity_map(n2_mod, fld), tensor_maps(w1.omega_F, identity_map(m2, fld))
    )
    shuttled_m2 = _shuttle(f, n1, m2, g, w2.sigma_M, fld)
    d2 = tensor_maps(identity_map(n2_mod, fld), shuttled_m2)
    pw_g1 = edge_power_bimodule(g, n1)
    e_step2 = invert(rebracket(n2_mod, m2, pw_g1, fld))
    f_step2 = tensor_maps(w2.omega_F, identity_map(pw_g1, fld))
    g_step2 = _merge_powers(g, n2, n1, fld)
    omega_f = compose(
        g_step2, compose(f_step2, compose(e_step2, compose(d2, compose(c2, compose(b2, a2)))))
    )

    return ComWitness(e, g, big_m, big_n, n1 + n2, omega_e, omega_f, sigma_m, sigma_n)
