"""Subloops of finite loops: generation, normality, enumeration, socle layers."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import CapExceeded, NotDescending
from .loop import CayleyLoop, power_map


class SubloopSet:
    """A subloop of ``owner`` stored as a boolean mask over its elements.

    ``normal`` is None until normality has been checked.
    """

    __slots__ = ("owner", "mask", "normal", "_key")

    def __init__(self, owner: CayleyLoop, mask, normal: bool | None = None):
        mask = np.asarray(mask, dtype=bool)
        mask.setflags(write=False)
        self.owner = owner
        self.mask = mask
        self.normal = normal
        self._key = None

    @property
    def members(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.mask)]

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    def __len__(self):
        return self.order

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    def __iter__(self):
        return iter(self.members)

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self.mask).tobytes()
        return self._key

    def encoding(self) -> int:
        """The bit-set as an integer (bit i set iff element i is a member)."""
        return int(sum(1 << i for i in self.members))

    def __eq__(self, other):
        if not isinstance(other, SubloopSet):
            return NotImplemented
        return self.owner is other.owner and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __le__(self, other: SubloopSet) -> bool:
        return bool((self.mask <= other.mask).all())

    def __lt__(self, other: SubloopSet) -> bool:
        return self <= other and self.order < other.order

    def __and__(self, other: SubloopSet) -> SubloopSet:
        return SubloopSet(self.owner, self.mask & other.mask)

    def __repr__(self):
        return f"SubloopSet(order={self.order}, normal={self.normal})"


def _mask(Q: CayleyLoop, elements) -> np.ndarray:
    m = np.zeros(Q.n, bool)
    m[Q.e] = True
    idx = np.asarray(list(elements), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= Q.n:
            raise IndexError("element index out of range")
        m[idx] = True
    return m


def generate(Q: CayleyLoop, elements=()) -> SubloopSet:
    """Least subloop containing ``elements``."""
    return SubloopSet(Q, kernels.close_subloop(Q.table, Q.inv, _mask(Q, elements)))


def whole(Q: CayleyLoop) -> SubloopSet:
    return SubloopSet(Q, np.ones(Q.n, bool), normal=True)


def trivial(Q: CayleyLoop) -> SubloopSet:
    return SubloopSet(Q, _mask(Q, ()), normal=True)


def is_subloop(Q: CayleyLoop, mask) -> bool:
    mask = np.asarray(mask, bool)
    if not mask[Q.e]:
        return False
    return bool(np.array_equal(kernels.close_subloop(Q.table, Q.inv, mask), mask))


def is_normal(Q: CayleyLoop, H: SubloopSet):
    """``(ok, witness)`` where the witness (x, y, h) has L(x,y)h outside H."""
    hit = kernels.witness(kernels.normality_witness(Q.table, Q.ldiv, H.mask))
    H.normal = hit is None
    return hit is None, hit


def inner_generators(Q: CayleyLoop) -> np.ndarray:
    """Distinct inner mappings L(x,y), one per row, in first-seen order."""
    T, LD = Q.table, Q.ldiv
    seen = {}
    for x in range(Q.n):
        rows = LD[T[x][:, None], T[x][T]]
        for row in rows:
            key = row.tobytes()
            if key not in seen:
                seen[key] = row.copy()
    return np.array(list(seen.values()), dtype=np.int64).reshape(-1, Q.n)


def normal_closure(Q: CayleyLoop, elements=(), inner: np.ndarray | None = None) -> SubloopSet:
    """Least normal subloop containing ``elements``.

    Alternates subloop closure with images under the inner mappings until
    nothing new appears.
    """
    if inner is None:
        inner = inner_generators(Q)
    mask = kernels.close_subloop(Q.table, Q.inv, _mask(Q, elements))
    while True:
        images = inner[:, np.flatnonzero(mask)]
        grown = mask.copy()
        grown[images.ravel()] = True
        if np.array_equal(grown, mask):
            return SubloopSet(Q, mask, normal=True)
        mask = kernels.close_subloop(Q.table, Q.inv, grown)


def all_subloops(Q: CayleyLoop, cap: int = 50_000) -> list[SubloopSet]:
    """Every subloop of Q, sorted by order and then bit-set encoding.

    Breadth-first over subloops generated by adding one element at a time.
    Every subloop is reached this way: a subloop H with generators g1..gk
    appears as <<...<g1>...>, gk>.
    """
    start = trivial(Q)
    seen = {start.key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for H in frontier:
            for g in np.flatnonzero(~H.mask):
                K = SubloopSet(Q, kernels.close_subloop(Q.table, Q.inv, H.mask | _mask(Q, (g,))))
                if K.key not in seen:
                    seen[K.key] = K
                    nxt.append(K)
                    if len(seen) > cap:
                        raise CapExceeded(cap, len(seen))
        frontier = nxt
    return sorted(seen.values(), key=lambda S: (S.order, S.encoding()))


def normal_subloops(Q: CayleyLoop, cap: int = 50_000) -> list[SubloopSet]:
    return [H for H in all_subloops(Q, cap) if is_normal(Q, H)[0]]


def minimal_normal_subloops(Q: CayleyLoop) -> list[SubloopSet]:
    """Minimal nontrivial normal subloops.

    Each one is the normal closure of any of its nonidentity elements, so it
    suffices to take the minimal members among single-element closures.
    """
    inner = inner_generators(Q)
    closures = {}
    for a in range(Q.n):
        if a == Q.e:
            continue
        N = normal_closure(Q, (a,), inner)
        closures.setdefault(N.key, N)
    cands = sorted(closures.values(), key=lambda S: (S.order, S.encoding()))
    return [N for N in cands if not any(M < N for M in cands)]


class Layer(NamedTuple):
    subloop: SubloopSet
    closure_added: bool


def layer(Q: CayleyLoop, p: int) -> Layer:
    """The subloop of elements with x^p = e, closed up if the raw set is not."""
    raw = power_map(Q, p) == Q.e
    closed = kernels.close_subloop(Q.table, Q.inv, raw)
    return Layer(SubloopSet(Q, closed), bool((closed & ~raw).any()))


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def cogenerator_subloop(Q: CayleyLoop) -> SubloopSet:
    """Product over primes p of the p-layers of the p-primary components.

    An element with x^p = e has p-power order, so the p-layer of Q_p is the
    p-layer of Q itself.
    """
    mask = np.zeros(Q.n, bool)
    mask[Q.e] = True
    for p in _prime_factors(Q.n):
        mask |= power_map(Q, p) == Q.e
    return SubloopSet(Q, kernels.close_subloop(Q.table, Q.inv, mask))


NORMAL_ENUMERATION_LIMIT = 100


def is_cogenerating(Q: CayleyLoop, B: SubloopSet, trials: int = 200, seed: int = 0):
    """Check that B meets every nontrivial normal subloop nontrivially.

    All normal subloops are enumerated for n <= 100; larger loops are tested
    against normal closures of ``trials`` random nonidentity elements.
    Returns ``(ok, witness)`` with the first normal subloop H where
    B and H meet only in e.
    """
    if Q.n <= NORMAL_ENUMERATION_LIMIT:
        candidates = normal_subloops(Q)
    else:
        rng = np.random.default_rng(seed)
        inner = inner_generators(Q)
        picks = rng.integers(0, Q.n, size=trials)
        candidates = [normal_closure(Q, (int(a),), inner) for a in picks if a != Q.e]
    for H in candidates:
        if H.order == 1:
            continue
        if (B.mask & H.mask).sum() <= 1:
            return False, H
    return True, None


def chain_stabilizes(Q: CayleyLoop, chain) -> int:
    """Least index from which the generated chain is constant.

    ``chain`` is a list of generating sets; each generated subloop must
    contain the next one.
    """
    terms = [generate(Q, gens) for gens in chain]
    for i in range(1, len(terms)):
        if not terms[i] <= terms[i - 1]:
            raise NotDescending(i)
    index = len(terms) - 1 if terms else 0
    while index > 0 and terms[index - 1] == terms[-1]:
        index -= 1
    return index
