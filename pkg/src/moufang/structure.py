"""Center, upper central series, primary decomposition and heights of finite CMLs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DecompositionFailure, SeriesStalled
from .loop import CayleyLoop, is_associative, orders, power_map, quotient
from .subloops import SubloopSet, _prime_factors, is_normal, normal_closure, trivial


def center(Q: CayleyLoop) -> SubloopSet:
    """Z(Q) = {x : (x,y,z) = e for all y, z}, by exhaustive scan."""
    mask = kernels.central_mask(Q.table, np.arange(Q.n, dtype=np.int64))
    return SubloopSet(Q, mask, normal=True)


def is_central(Q: CayleyLoop, elements) -> np.ndarray:
    """Centrality of selected elements only; cheaper than a full center scan."""
    cand = np.asarray(list(elements), dtype=np.int64)
    return kernels.central_mask(Q.table, cand)[cand]


@dataclass
class CentralSeries:
    terms: list[SubloopSet]

    @property
    def nilpotency_class(self) -> int:
        return len(self.terms) - 1

    @property
    def orders(self) -> list[int]:
        return [H.order for H in self.terms]


def upper_central_series(Q: CayleyLoop) -> CentralSeries:
    """Z_0 = {e}, Z_{i+1} = preimage of Z(Q/Z_i); stops at Q."""
    terms = [trivial(Q)]
    while terms[-1].order < Q.n:
        current = terms[-1]
        quo = quotient(Q, current)
        zq = center(quo.loop)
        mask = zq.mask[quo.projection]
        nxt = SubloopSet(Q, mask, normal=True)
        if nxt.order == current.order:
            raise SeriesStalled(
                f"center of the quotient by a subloop of order {current.order} is trivial")
        terms.append(nxt)
    return CentralSeries(terms)


def nilpotency_class(Q: CayleyLoop) -> int:
    return upper_central_series(Q).nilpotency_class


@dataclass
class PrimaryDecomposition:
    components: dict[int, SubloopSet]

    def orders(self) -> dict[int, int]:
        return {p: H.order for p, H in self.components.items()}


def _is_prime_power(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def p_decomposition(Q: CayleyLoop) -> PrimaryDecomposition:
    """Split Q into its maximal p-subloops and check the product is direct.

    Verifies that every component is a subloop, that multiplying the
    components together (in increasing prime order) is a bijection onto Q,
    and that components for p != 3 are central.
    """
    ords = orders(Q)
    comps = {}
    for p in _prime_factors(Q.n):
        mask = np.array([_is_prime_power(int(o), p) for o in ords])
        closed = kernels.close_subloop(Q.table, Q.inv, mask)
        if not np.array_equal(closed, mask):
            extra = int(np.flatnonzero(closed & ~mask)[0])
            raise DecompositionFailure(f"{p}-elements are not closed under products", extra)
        comps[p] = SubloopSet(Q, mask)

    reached = np.array([Q.e])
    for p, H in comps.items():
        prods = Q.table[np.ix_(reached, np.flatnonzero(H.mask))].ravel()
        if len(np.unique(prods)) != len(prods):
            raise DecompositionFailure(f"product with the {p}-component is not injective")
        reached = prods
    if len(reached) != Q.n:
        raise DecompositionFailure("components do not exhaust the loop")

    for p, H in comps.items():
        if p == 3:
            continue
        central = is_central(Q, H.members)
        if not central.all():
            bad = H.members[int(np.flatnonzero(~central)[0])]
            raise DecompositionFailure(f"{p}-component is not central", bad)
        H.normal = True
    return PrimaryDecomposition(comps)


def _valuation(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


def height_profile(Q: CayleyLoop, a: int, p: int) -> list[bool]:
    """Solvability of x^(p^n) = a for n = 0 .. v_p(exponent of Q)."""
    bound = _valuation(Q.exponent, p)
    return [bool((power_map(Q, p ** n) == a).any()) for n in range(bound + 1)]


def height(Q: CayleyLoop, a: int, p: int) -> int:
    """Largest n <= v_p(exponent) with x^(p^n) = a solvable in Q.

    See ``height_saturates`` for whether the equation stays solvable for
    every n (the finite form of infinite height).
    """
    profile = height_profile(Q, a, p)
    n = 0
    while n + 1 < len(profile) and profile[n + 1]:
        n += 1
    return n


def height_saturates(Q: CayleyLoop, a: int, p: int) -> bool:
    """True when x^(p^n) = a is solvable at the bound, hence for all n.

    A solution at n = v_p(exponent) has trivial p-part, and on elements
    without p-part the p-power map permutes the cyclic subgroup.
    """
    return height_profile(Q, a, p)[-1]


def associator_set(Q: CayleyLoop) -> np.ndarray:
    return kernels.associator_mask(Q.table, Q.ldiv)


def associator_subloop(Q: CayleyLoop) -> SubloopSet:
    """Normal subloop generated by all associators; the quotient is associative."""
    A = normal_closure(Q, np.flatnonzero(associator_set(Q)))
    assert is_associative(quotient(Q, A).loop), "quotient by the associator subloop is not associative"
    return A


def structure_report(Q: CayleyLoop) -> dict:
    series = upper_central_series(Q)
    dec = p_decomposition(Q)
    return {
        "order": Q.n,
        "exponent": Q.exponent,
        "center_order": series.terms[1].order if len(series.terms) > 1 else Q.n,
        "class": series.nilpotency_class,
        "series_orders": series.orders,
        "primary": {str(p): o for p, o in sorted(dec.orders().items())},
    }


__all__ = [
    "CentralSeries",
    "PrimaryDecomposition",
    "associator_set",
    "associator_subloop",
    "center",
    "height",
    "height_profile",
    "height_saturates",
    "is_central",
    "is_normal",
    "nilpotency_class",
    "p_decomposition",
    "structure_report",
    "upper_central_series",
]
