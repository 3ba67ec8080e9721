"""Exact backend for CMLs of the form D x C with D a finite sum of
quasicyclic groups and C a finite CML."""
from .complement import decompose, divisible_complement, verify_direct
from .elements import (
    INFINITE,
    Grid,
    StructuredCML,
    StructuredElement,
    element_from_json,
    element_to_json,
    format_fraction,
    parse_fraction,
    s_associator,
    s_inv,
    s_mul,
    s_order,
    s_pow,
)
from .io import load_structured, subloop_from_json, subloop_to_json
from .series import (
    PRIME,
    QUASICYCLIC,
    Factor,
    SeriesTerm,
    Truncation,
    factor_orders,
    predicted_truncation_structure,
    quasicyclic_factor_series,
    truncate,
)
from .subloops import (
    StructuredSubloop,
    cogenerator_subloop,
    divisible_part,
    height3,
    intersection,
    is_cogenerating,
    is_normal,
    make_subloop,
    random_descending_chain,
    random_element,
    reduced_split,
    relevant_primes,
    s_chain_stabilizes,
    s_generate,
    s_normal_closure,
    socle,
    trivial,
    whole,
)
