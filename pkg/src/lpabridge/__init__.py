"""Exact computation with path algebras of finite graphs: shift equivalence
of adjacency matrices, polymorphism bimodules, conjugacy pairs, and the
bridging bimodule tying the two path algebras together."""

from .fields import PrimeField, Rationals, field_from_name
from .graphs import (
    Edge,
    Graph,
    GraphError,
    NonNegMatrix,
    Polymorphism,
    adjacency,
    graph,
    identity_polymorphism,
    is_sink_free,
    iso_check,
    iter_sink_free_graphs,
    polymorphism_from_matrix,
    power,
    product,
    sinks,
)
from .shift_equiv import (
    SEWitness,
    SSEStep,
    search_elementary_sse,
    search_se,
    search_sse_chain,
    verify_elementary_sse,
    verify_se,
    verify_sse_chain,
)
from .lpa import (
    LpaElement,
    LpaError,
    Monomial,
    degree,
    homogeneous_components,
    multiply,
    normalize,
    unit,
    vertex_expansion,
)
from .bimodules import (
    BasisVec,
    BlockMap,
    ConjugacyPair,
    MseMaps,
    PolyBimodule,
    bimodule_of_polymorphism,
    canonical_block_bijection,
    epsilon,
    hash_compose,
    mse_from_se,
    nu,
    nu_pair,
    polymorphism_of_bimodule,
    rebracket,
    tensor,
    tensor_maps,
    verify_conjugacy,
    verify_pair_equivalence,
)
from .bridge import (
    BridgeElement,
    bridge_element,
    degree_of,
    eta,
    left_act,
    left_act_element,
    pair_tensor_act,
    psi_identity,
    rho,
    right_act,
    tau,
    verify_ck_on_bridge,
)
from .com import ComWitness, chain_com, com_from_elementary_sse, verify_com

__all__ = [name for name in dir() if not name.startswith("_")]
