"""Subloops of D x C: canonical form, generation, normality, socles and chains."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import NotDescending
from ..loop import power_map
from ..structure import height, height_saturates
from ..subloops import _prime_factors
from .elements import (
    INFINITE,
    Grid,
    StructuredCML,
    StructuredElement,
    close_indices,
)

DEFAULT_CAP = 1_000_000


class StructuredSubloop:
    """(sum of the ``full`` summands) . <residual>.

    The residual is a finite subloop whose elements have zero coordinates in
    every full summand, so two subloops are equal exactly when their
    ``full`` sets and residual sets agree.
    """

    __slots__ = ("owner", "full", "residual")

    def __init__(self, owner: StructuredCML, full, residual):
        self.owner = owner
        self.full = frozenset(int(i) for i in full)
        self.residual = frozenset(residual)

    @property
    def is_finite(self) -> bool:
        return not self.full

    @property
    def order(self):
        """Element count, or INFINITE when a summand is fully contained."""
        return INFINITE if self.full else len(self.residual)

    @property
    def residual_order(self) -> int:
        return len(self.residual)

    def project(self, a: StructuredElement) -> StructuredElement:
        div = tuple(0 * f if i in self.full else f for i, f in enumerate(a.div))
        return StructuredElement(div, a.fin)

    def __contains__(self, a: StructuredElement) -> bool:
        return self.project(a) in self.residual

    def __le__(self, other: StructuredSubloop) -> bool:
        if not self.full <= other.full:
            return False
        if self.full == other.full:
            return self.residual <= other.residual
        return all(a in other for a in self.residual)

    def __lt__(self, other: StructuredSubloop) -> bool:
        return self <= other and self != other

    def __eq__(self, other):
        if not isinstance(other, StructuredSubloop):
            return NotImplemented
        return self.full == other.full and self.residual == other.residual

    def __hash__(self):
        return hash((self.full, self.residual))

    def elements(self) -> list[StructuredElement]:
        if self.full:
            raise ValueError("subloop with a full quasicyclic summand is infinite")
        return sorted(self.residual)

    def __repr__(self):
        return f"StructuredSubloop(full={sorted(self.full)}, residual_order={len(self.residual)})"


def _zero_full(Q: StructuredCML, full, a: StructuredElement) -> StructuredElement:
    div = tuple(0 * f if i in full else f for i, f in enumerate(a.div))
    return StructuredElement(div, a.fin)


def make_subloop(Q: StructuredCML, full=(), gens=(), cap: int = DEFAULT_CAP) -> StructuredSubloop:
    """Subloop generated by the ``full`` summands together with ``gens``.

    Coordinates in full summands are dropped from the generators; the
    residual is then closed (zero coordinates stay zero under products).
    """
    full = frozenset(full)
    seeds = [_zero_full(Q, full, a) for a in gens]
    grid = Grid(Q, Q.levels(seeds))
    idx = close_indices(grid, grid.index_of(seeds), cap)
    return StructuredSubloop(Q, full, grid.elements_of(idx))


def s_generate(Q: StructuredCML, gens, cap: int = DEFAULT_CAP) -> StructuredSubloop:
    """Finite subloop generated by finitely many elements."""
    return make_subloop(Q, (), gens, cap)


def whole(Q: StructuredCML) -> StructuredSubloop:
    return make_subloop(Q, range(Q.r), [Q.element((), c) for c in range(Q.C.n)])


def trivial(Q: StructuredCML) -> StructuredSubloop:
    return StructuredSubloop(Q, (), [Q.identity])


def intersection(H: StructuredSubloop, K: StructuredSubloop) -> StructuredSubloop:
    """H meet K.

    Coordinates outside H.full (or K.full) are bounded by that side's
    residual, so enumerating H up to the larger of the two residual levels
    finds every common element.
    """
    Q = H.owner
    both = H.full & K.full
    lev = [max(a, b) for a, b in zip(Q.levels(H.residual), Q.levels(K.residual))]
    grid = Grid(Q, lev)
    common = []
    only_h = sorted(H.full - both)
    base = grid.index_of(sorted(H.residual))
    # vary the H-only full coordinates over the grid
    steps = [base]
    for i in only_h:
        m = grid.mods[i]
        ds, c = grid.decode(steps[-1])
        expanded = []
        for t in range(m):
            ds2 = list(ds)
            ds2[i] = (ds[i] + t) % m
            expanded.append(grid.encode(ds2, c))
        steps.append(np.unique(np.concatenate(expanded)))
    for a in grid.elements_of(steps[-1]):
        a = _zero_full(Q, both, a)
        if a in K:
            common.append(a)
    return StructuredSubloop(Q, both, common)


def s_normal_closure(Q: StructuredCML, gens, full=(), cap: int = DEFAULT_CAP) -> StructuredSubloop:
    """Least normal subloop containing ``gens`` (and the ``full`` summands).

    Inner mappings fix the central divisible part and act on the finite
    coordinate as inner mappings of C.
    """
    full = frozenset(full)
    seeds = [_zero_full(Q, full, a) for a in gens]
    grid = Grid(Q, Q.levels(seeds))
    idx = close_indices(grid, grid.index_of(seeds), cap)
    while True:
        images = np.concatenate([grid.apply_fin(idx, perm) for perm in Q.inner])
        new = np.setdiff1d(images, idx)
        if not len(new):
            return StructuredSubloop(Q, full, grid.elements_of(idx))
        idx = close_indices(grid, np.concatenate([idx, new]), cap)


def is_normal(Q: StructuredCML, H: StructuredSubloop):
    """``(ok, witness)``; decided on finite coordinates only."""
    for a in sorted(H.residual):
        for perm in Q.inner:
            b = StructuredElement(a.div, int(perm[a.fin]))
            if b not in H:
                return False, (a, b)
    return True, None


def height3(Q: StructuredCML, a: StructuredElement):
    """3-height of ``a``; INFINITE when x^(3^n) = a is solvable for every n.

    The divisible summands are solvable at every level, so only the finite
    coordinate matters.
    """
    if height_saturates(Q.C, a.fin, 3):
        return INFINITE
    return height(Q.C, a.fin, 3)


def socle(Q: StructuredCML, p: int) -> StructuredSubloop:
    """Subloop of elements whose p-th power is the identity."""
    choices = []
    for q in Q.summands:
        choices.append(range(p) if q == p else range(1))
    fins = np.flatnonzero(power_map(Q.C, p) == Q.C.e)
    levels = [1 if q == p else 0 for q in Q.summands]
    grid = Grid(Q, levels)
    ds = np.meshgrid(*[np.arange(len(ch)) for ch in choices], fins, indexing="ij")
    idx = grid.encode([d.ravel() for d in ds[:-1]], ds[-1].ravel())
    return StructuredSubloop(Q, (), grid.elements_of(close_indices(grid, idx)))


def relevant_primes(Q: StructuredCML) -> list[int]:
    return sorted(set(Q.summands) | set(_prime_factors(Q.C.n)))


def cogenerator_subloop(Q: StructuredCML) -> StructuredSubloop:
    """Product of the socles over every prime present in Q."""
    gens = []
    for p in relevant_primes(Q):
        gens.extend(socle(Q, p).residual)
    return s_generate(Q, gens)


def random_element(Q: StructuredCML, rng, max_level: int = 3, nonidentity: bool = True):
    """Random element with denominators at most p^max_level."""
    while True:
        div = []
        for p in Q.summands:
            k = int(rng.integers(0, max_level + 1))
            div.append(Fraction(int(rng.integers(0, p ** k)), p ** k))
        a = Q.element(div, int(rng.integers(0, Q.C.n)))
        if not nonidentity or a != Q.identity:
            return a


def is_cogenerating(Q: StructuredCML, B: StructuredSubloop, trials: int = 200, seed: int = 0):
    """Test that B meets the normal closures of ``trials`` random
    nonidentity elements nontrivially.  Returns ``(ok, witness)``."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        a = random_element(Q, rng)
        H = s_normal_closure(Q, [a])
        if not any(x in B for x in H.residual if x != Q.identity):
            return False, (a, H)
    return True, None


def divisible_part(H: StructuredSubloop) -> StructuredSubloop:
    """The maximal divisible subloop of H: its fully contained summands."""
    return StructuredSubloop(H.owner, H.full, [H.owner.identity])


def reduced_split(Q: StructuredCML):
    """(D, C): the divisible part and the finite reduced complement."""
    D = StructuredSubloop(Q, range(Q.r), [Q.identity])
    C = StructuredSubloop(Q, (), [Q.element((), c) for c in range(Q.C.n)])
    return D, C


# chains ---------------------------------------------------------------------

def s_chain_stabilizes(chain) -> int:
    """Least index from which a descending chain of subloops is constant."""
    for i in range(1, len(chain)):
        if not chain[i] <= chain[i - 1]:
            raise NotDescending(i)
    index = len(chain) - 1 if chain else 0
    while index > 0 and chain[index - 1] == chain[-1]:
        index -= 1
    return index


def random_descending_chain(Q: StructuredCML, rng, max_level: int = 2, tail: int = 2):
    """A strictly descending chain from Q down to {e}, then ``tail`` repeats.

    Full summands are cut to finite cyclic pieces first; finite subloops are
    replaced by proper subloops generated by random members.
    """
    H = whole(Q)
    chain = [H]
    while True:
        if H.full:
            i = sorted(H.full)[int(rng.integers(0, len(H.full)))]
            p = Q.summands[i]
            k = int(rng.integers(1, max_level + 1))
            div = [0] * Q.r
            div[i] = f"1/{p ** k}"
            nxt = make_subloop(Q, H.full - {i}, list(H.residual) + [Q.element(div)])
        elif H.residual_order > 1:
            # integer sort key: Fraction comparisons dominate otherwise
            members = sorted(H.residual, key=lambda a: (a.fin, [(f.numerator, f.denominator) for f in a.div]))
            nxt = None
            for _ in range(10):
                picks = rng.choice(len(members), size=int(rng.integers(1, 3)))
                cand = s_generate(Q, [members[j] for j in picks])
                if cand < H:
                    nxt = cand
                    break
            if nxt is None:
                nxt = trivial(Q)
        else:
            break
        chain.append(nxt)
        H = nxt
    chain.extend([H] * tail)
    return chain
