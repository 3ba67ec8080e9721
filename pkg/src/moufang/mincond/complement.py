"""Complements of the divisible part: Q = D x K with K containing a given B.

Every complement of D = sum Z(p_i^inf) in D x C is the graph
{(psi(c), c)} of a homomorphism psi: C -> D.  D is abelian, so psi kills
the associator subloop of C and factors through the abelian group
C / A(C); its values have order dividing the exponent of C.  The search
enumerates such homomorphisms summand by summand, in lexicographic order of
generator images, and keeps the first one that agrees with B.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import NoComplementFound, PreconditionViolated
from ..loop import quotient
from ..structure import associator_subloop
from ..subloops import generate
from .elements import Grid, StructuredCML, StructuredElement, _valuation, s_inv, s_mul
from .subloops import StructuredSubloop, s_generate


def _generators(G) -> list[int]:
    """Greedy generating set of a finite loop, taken in index order."""
    gens = []
    span = generate(G, ())
    for x in range(G.n):
        if x not in span:
            gens.append(x)
            span = generate(G, gens)
            if span.order == G.n:
                break
    return gens


def _extend(G, gens, images, m):
    """Extend generator images to a map G -> Z/m; None if inconsistent or
    not a homomorphism."""
    val = np.full(G.n, -1, dtype=np.int64)
    val[G.e] = 0
    queue = [G.e]
    for h in queue:
        for g, v in zip(gens, images):
            x = int(G.table[h, g])
            w = (val[h] + v) % m
            if val[x] < 0:
                val[x] = w
                queue.append(x)
            elif val[x] != w:
                return None
    if (val < 0).any():
        return None
    if not np.array_equal(val[G.table], (val[:, None] + val[None, :]) % m):
        return None
    return val


def _homomorphisms(G, gens, m):
    """All homomorphisms G -> Z/m, in lexicographic order of generator images."""
    images = [0] * len(gens)
    while True:
        val = _extend(G, gens, images, m)
        if val is not None:
            yield val
        j = len(images) - 1
        while j >= 0 and images[j] == m - 1:
            images[j] = 0
            j -= 1
        if j < 0:
            return
        images[j] += 1


def divisible_complement(Q: StructuredCML, B: StructuredSubloop) -> StructuredSubloop:
    """A complement K of the divisible part with B inside K."""
    if not B.is_finite:
        raise PreconditionViolated("B must be finite")
    for b in B.residual:
        if b.fin == Q.C.e and b != Q.identity:
            raise PreconditionViolated(f"B meets the divisible part in {b}")
    C = Q.C
    abel = quotient(C, associator_subloop(C))
    G, proj = abel.loop, abel.projection
    gens = _generators(G)
    constraints = sorted(B.residual)

    psi = []
    for i, p in enumerate(Q.summands):
        m = p ** _valuation(C.exponent, p)
        wanted = {int(proj[C.e]): 0}
        for b in constraints:
            scaled = b.div[i] * m
            if scaled.denominator != 1:
                raise NoComplementFound(f"{b} has a coordinate outside the bounded part of D")
            g = int(proj[b.fin])
            if wanted.setdefault(g, int(scaled)) != int(scaled):
                if g == proj[C.e]:
                    raise NoComplementFound(
                        f"{b}: its finite part lies in the associator subloop of C, which every "
                        "complement pairs with 0 in D")
                raise NoComplementFound("B is not the graph of a map on C")
        for val in _homomorphisms(G, gens, m):
            if all(val[g] == v for g, v in wanted.items()):
                psi.append((val, m))
                break
        else:
            raise NoComplementFound(f"no homomorphism into summand {i} agrees with B")

    residual = []
    for c in range(C.n):
        g = int(proj[c])
        residual.append(StructuredElement(tuple(Fraction(int(val[g]), m) for val, m in psi), c))
    K = StructuredSubloop(Q, (), residual)
    if s_generate(Q, residual) != K:
        raise NoComplementFound("graph of psi is not closed")
    if not B <= K:
        raise NoComplementFound("complement does not contain B")
    return K


def verify_direct(Q: StructuredCML, K: StructuredSubloop, k: int):
    """Check Q = D x K on the truncation with denominators dividing p^k.

    For every element q there must be exactly one kappa in K with
    kappa^-1 q in D; K and D must meet only in the identity.  Returns
    ``(ok, witness)``.
    """
    for a in K.residual:
        if a.fin == Q.C.e and a != Q.identity:
            return False, ("meets_divisible", a)
    levels = [max(k, lv) for lv in Q.levels(K.residual)]
    grid = Grid(Q, levels)
    kappas = sorted(K.residual)
    kidx = grid.index_of(kappas)
    trunc = Grid(Q, [k] * Q.r)
    qs = grid.index_of(trunc.elements_of(trunc.all_indices()))
    hits = np.zeros(len(qs), dtype=np.int64)
    for ki in kidx:
        _, c = grid.decode(grid.mul(grid.inv(np.int64(ki)), qs))
        hits += c == Q.C.e
    bad = np.flatnonzero(hits != 1)
    if len(bad):
        return False, ("decomposition_count", grid.elements_of(qs[bad[:1]])[0], int(hits[bad[0]]))
    return True, None


def decompose(Q: StructuredCML, K: StructuredSubloop, q: StructuredElement):
    """Split q = d . kappa with d in D and kappa in K."""
    for kappa in K.residual:
        d = s_mul(Q, q, s_inv(Q, kappa))
        if d.fin == Q.C.e:
            return d, kappa
    raise NoComplementFound(f"{q} has no decomposition")
