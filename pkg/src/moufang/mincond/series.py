"""Composition-type series with quasicyclic and prime-order factors, and
finite truncations of D x C."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import CapExceeded
from ..loop import CayleyLoop, power
from ..structure import upper_central_series
from ..subloops import _prime_factors, generate, trivial as loop_trivial
from .elements import Grid, StructuredCML, StructuredElement
from .subloops import StructuredSubloop, is_normal

QUASICYCLIC = "QUASICYCLIC"
PRIME = "PRIME"


@dataclass(frozen=True)
class Factor:
    kind: str
    p: int

    def __str__(self):
        return f"{self.kind}({self.p})"


@dataclass
class SeriesTerm:
    subloop: StructuredSubloop
    factor: Factor | None  # factor over the previous term; None for the first


def _refine(C: CayleyLoop, lower, upper):
    """Subloops strictly between two consecutive central-series terms, each
    of prime index in the next.  Yields (mask, prime)."""
    current = lower.mask.copy()
    primes = _prime_factors(C.n)
    while not np.array_equal(current, upper.mask):
        step = None
        for g in np.flatnonzero(upper.mask & ~current):
            for p in primes:
                if current[power(C, int(g), p)]:
                    step = (int(g), p)
                    break
            if step:
                break
        g, p = step
        nxt = generate(C, list(np.flatnonzero(current)) + [g]).mask
        ratio, rem = divmod(int(nxt.sum()), int(current.sum()))
        assert rem == 0 and ratio == p, "refinement step does not have prime index"
        yield nxt, p
        current = nxt


def quasicyclic_factor_series(Q: StructuredCML) -> list[SeriesTerm]:
    """1 = H_0 < ... < H_m = Q with quasicyclic factors first, then the
    upper central series of C refined to prime-order factors.

    Each term is checked to be normal in Q.
    """
    terms = [SeriesTerm(StructuredSubloop(Q, (), [Q.identity]), None)]
    for i, p in enumerate(Q.summands):
        H = StructuredSubloop(Q, range(i + 1), [Q.identity])
        terms.append(SeriesTerm(H, Factor(QUASICYCLIC, p)))
    full = range(Q.r)
    series = upper_central_series(Q.C).terms
    prev = loop_trivial(Q.C)
    for Z in series[1:]:
        for mask, p in _refine(Q.C, prev, Z):
            residual = [Q.element((), int(c)) for c in np.flatnonzero(mask)]
            terms.append(SeriesTerm(StructuredSubloop(Q, full, residual), Factor(PRIME, p)))
        prev = Z
    for t in terms:
        ok, wit = is_normal(Q, t.subloop)
        assert ok, f"series term is not normal: {wit}"
    return terms


def factor_orders(terms) -> list[int | None]:
    """Order of each finite factor; None for quasicyclic factors."""
    return [t.factor.p if t.factor.kind == PRIME else None for t in terms[1:]]


@dataclass
class Truncation:
    loop: CayleyLoop
    elements: list[StructuredElement]  # loop index -> structured element
    grid: Grid

    def index(self, a: StructuredElement) -> int:
        return int(self.grid.index_of([a])[0])


TRUNCATE_CAP = 6000


def truncate(Q: StructuredCML, k: int, cap: int = TRUNCATE_CAP) -> Truncation:
    """The finite subloop sum Z(p_i^k) x C as a Cayley table, with its
    embedding into Q."""
    if k < 0:
        raise ValueError("k must be non-negative")
    grid = Grid(Q, [k] * Q.r)
    if grid.size > cap:
        raise CapExceeded(cap, grid.size)
    idx = grid.all_indices()
    table = grid.mul(idx[:, None], idx[None, :])
    label = "*".join([f"Z{p}^{k}" for p in Q.summands] + [Q.C.name or f"C{Q.C.n}"])
    loop = CayleyLoop(table, Q.C.e, name=label, cml=Q.C.cml)
    return Truncation(loop, grid.elements_of(idx), grid)


def predicted_truncation_structure(Q: StructuredCML, k: int) -> dict:
    """Center and upper central series orders of truncate(Q, k), derived from
    C alone: Z_i(A x C) = A x Z_i(C) for an abelian group A and i >= 1."""
    a = math.prod(p ** k for p in Q.summands)
    c_orders = upper_central_series(Q.C).orders
    if a == 1:
        orders = c_orders
    elif len(c_orders) == 1:
        orders = [1, a]
    else:
        orders = [1] + [a * o for o in c_orders[1:]]
    return {
        "order": a * Q.C.n,
        "center_order": orders[1] if len(orders) > 1 else 1,
        "class": len(orders) - 1,
        "series_orders": orders,
    }
