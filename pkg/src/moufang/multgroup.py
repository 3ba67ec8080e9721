"""Multiplication groups and inner mapping groups as permutation groups.

Groups are closed by breadth-first search over a reduced generator list,
with every element kept as one row of an image array.  Rows are hashed by a
compiled kernel; a hash hit is confirmed by comparing the full rows.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapExceeded, NotCentralFactor, NotMaterialized, PreconditionViolated
from .loop import CayleyLoop, inner_mapping_rows, orders
from .structure import center

DEFAULT_CAP = 10_000_000


class Perm:
    """A permutation of ``range(n)`` stored as its image array.

    ``p * q`` is composition with q applied first.
    """

    __slots__ = ("images",)

    def __init__(self, images):
        images = np.asarray(images, dtype=np.int64)
        if sorted(images.tolist()) != list(range(len(images))):
            raise ValueError("not a permutation")
        images.setflags(write=False)
        self.images = images

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(np.arange(n))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __mul__(self, other: Perm) -> Perm:
        return Perm(self.images[other.images])

    def inverse(self) -> Perm:
        out = np.empty_like(self.images)
        out[self.images] = np.arange(self.degree)
        return Perm(out)

    def order(self) -> int:
        return int(kernels.perm_orders(self.images[None, :])[0])

    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.degree)).all())

    def __eq__(self, other):
        return isinstance(other, Perm) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"Perm({self.images.tolist()})"


class _RowIndex:
    """Hash index over permutation rows stored in a growing array."""

    def __init__(self, n: int):
        self.n = n
        self.rows = np.empty((16, n), dtype=np.int32 if n > 32000 else np.int16)
        self.count = 0
        self.buckets: dict[int, list[int]] = {}

    def find(self, row, h) -> int:
        for i in self.buckets.get(h, ()):
            if np.array_equal(self.rows[i], row):
                return i
        return -1

    def add_new(self, batch) -> np.ndarray:
        """Insert rows not already present; return the inserted rows."""
        hashes = kernels.row_hashes(batch)
        fresh = []
        for row, h in zip(batch, hashes.tolist()):
            if self.find(row, h) >= 0:
                continue
            if self.count == len(self.rows):
                self.rows = np.concatenate([self.rows, np.empty_like(self.rows)])
            self.rows[self.count] = row
            self.buckets.setdefault(h, []).append(self.count)
            self.count += 1
            fresh.append(self.count - 1)
        return self.rows[fresh].astype(np.int64)

    def contains(self, row) -> bool:
        h = int(kernels.row_hashes(np.asarray(row)[None, :])[0])
        return self.find(row, h) >= 0


class PermGroup:
    """A permutation group of degree ``n`` with all elements materialized.

    ``elements`` holds one permutation per row, sorted lexicographically.
    """

    def __init__(self, degree: int, generators: list[Perm], elements: np.ndarray | None):
        self.degree = degree
        self.generators = generators
        self._elements = elements
        self._index = None

    @property
    def materialized(self) -> bool:
        return self._elements is not None

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            raise NotMaterialized("group elements were not materialized")
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def _lookup(self) -> _RowIndex:
        if self._index is None:
            idx = _RowIndex(self.degree)
            idx.add_new(self.elements)
            self._index = idx
        return self._index

    def __contains__(self, perm) -> bool:
        row = perm.images if isinstance(perm, Perm) else np.asarray(perm)
        return self._lookup().contains(row)

    def issubgroup(self, other: PermGroup) -> bool:
        return all(row in other for row in self.elements)

    def __repr__(self):
        state = self.order if self.materialized else "?"
        return f"PermGroup(degree={self.degree}, order={state})"


def _sorted_rows(rows: np.ndarray) -> np.ndarray:
    order = np.lexsort(rows.T[::-1])
    return np.ascontiguousarray(rows[order])


def closure(degree: int, candidates, cap: int = DEFAULT_CAP) -> PermGroup:
    """Group generated by ``candidates`` (an iterable of image rows).

    A candidate becomes a generator only if it is not already in the group
    built so far; adding a generator extends the group by BFS from the new
    products only.
    """
    index = _RowIndex(degree)
    index.add_new(np.arange(degree)[None, :])
    gens: list[np.ndarray] = []
    for cand in candidates:
        cand = np.asarray(cand, dtype=np.int64)
        if index.contains(cand):
            continue
        gens.append(cand)
        # old elements are closed under old generators; only x*cand is new
        frontier = index.add_new(index.rows[:index.count].astype(np.int64)[:, cand])
        while len(frontier):
            if index.count > cap:
                raise CapExceeded(cap, index.count)
            batch = np.concatenate([frontier[:, g] for g in gens])
            frontier = index.add_new(batch)
        if index.count > cap:
            raise CapExceeded(cap, index.count)
    elements = _sorted_rows(index.rows[:index.count].astype(np.int64))
    group = PermGroup(degree, [Perm(g) for g in gens], elements)
    group._index = index
    return group


def _translation_rows(Q: CayleyLoop):
    for x in range(Q.n):
        yield Q.table[x]


def _inner_rows(Q: CayleyLoop):
    for x in range(Q.n):
        yield from inner_mapping_rows(Q, x)


def mult_group(Q: CayleyLoop, cap: int = DEFAULT_CAP) -> PermGroup:
    """The multiplication group, generated by all left translations."""
    return closure(Q.n, _translation_rows(Q), cap)


def inner_group(Q: CayleyLoop, cap: int = DEFAULT_CAP) -> PermGroup:
    """The inner mapping group, generated by all L(x,y)."""
    return closure(Q.n, _inner_rows(Q), cap)


def subgroup_generated(Q: CayleyLoop, elements, cap: int = DEFAULT_CAP) -> PermGroup:
    """The subgroup M(H) generated by the translations of the given elements."""
    return closure(Q.n, (Q.table[x] for x in elements), cap)


def group_center(G: PermGroup) -> PermGroup:
    E = G.elements
    keep = np.ones(len(E), bool)
    for g in G.generators:
        gi = g.images
        keep &= (E[:, gi] == gi[E]).all(axis=1)
    return PermGroup(G.degree, [Perm(r) for r in E[keep]], np.ascontiguousarray(E[keep]))


def derived_subgroup(G: PermGroup, cap: int = DEFAULT_CAP) -> PermGroup:
    """Normal closure of the commutators of the generators."""
    G.elements  # raises NotMaterialized
    gens = [g.images for g in G.generators]
    comms = []
    for a in gens:
        ai = np.argsort(a)
        for b in gens:
            bi = np.argsort(b)
            comms.append(ai[bi[a[b]]])  # a^-1 b^-1 a b
    N = closure(G.degree, comms, cap)
    while True:
        E = N.elements
        added = []
        for g in gens:
            gi = np.argsort(g)
            conj = gi[E[:, g]]  # g^-1 n g
            added.extend(row for row in conj if row not in N)
        if not added:
            return N
        N = closure(G.degree, [h.images for h in N.generators] + added, cap)


def _prime_power(m: int, p: int) -> bool:
    while m > 1 and m % p == 0:
        m //= p
    return m == 1


def element_orders(G: PermGroup) -> np.ndarray:
    return kernels.perm_orders(G.elements)


def element_order_census(G: PermGroup) -> dict[int, int]:
    counts = Counter(int(o) for o in element_orders(G))
    return dict(sorted(counts.items()))


def is_p_group(G: PermGroup, p: int) -> bool:
    if not _prime_power(G.order, p):
        return False
    return all(_prime_power(o, p) for o in element_order_census(G))


def check_center_formula(Q: CayleyLoop, M: PermGroup | None = None):
    """Check Z(M) = {L(a) : a in Z(Q)} as sets of permutations.

    Returns ``(ok, witness)``; the witness names a side and an offending
    permutation row.
    """
    M = M if M is not None else mult_group(Q)
    ZM = group_center(M)
    ZQ = center(Q)
    trans = Q.table[ZQ.members].astype(np.int64)
    lhs = {row.tobytes() for row in ZM.elements}
    rhs = {row.tobytes() for row in trans}
    if lhs == rhs:
        return True, None
    for row in ZM.elements:
        if row.tobytes() not in rhs:
            return False, ("group_center_extra", row.tolist())
    for row in trans:
        if row.tobytes() not in lhs:
            return False, ("translation_not_central", row.tolist())
    raise AssertionError("unreachable")


@dataclass
class CentralFactorReport:
    mult_order: int
    factor_order: int
    rest_order: int
    factor_central: bool
    trivial_intersection: bool
    product_is_whole: bool
    isomorphic_to_factor: bool
    p_parts_central: dict[int, bool]

    @property
    def passed(self) -> bool:
        return (self.factor_central and self.trivial_intersection and self.product_is_whole
                and self.isomorphic_to_factor and all(self.p_parts_central.values()))

    def to_dict(self):
        return {
            "factor_central": self.factor_central,
            "factor_order": self.factor_order,
            "isomorphic_to_factor": self.isomorphic_to_factor,
            "mult_order": self.mult_order,
            "p_parts_central": {str(p): v for p, v in sorted(self.p_parts_central.items())},
            "passed": self.passed,
            "product_is_whole": self.product_is_whole,
            "rest_order": self.rest_order,
            "trivial_intersection": self.trivial_intersection,
        }


def check_central_factor(Q: CayleyLoop, D, H, cap: int = DEFAULT_CAP) -> CentralFactorReport:
    """Verify M = M(D) x M(H) for a decomposition Q = D x H with D central.

    Checks that M(D) lies in Z(M), that M(D) and M(H) meet trivially, that
    their products give all of M, and that a -> L(a) is an isomorphism
    D -> M(D).  Also reports whether the elements of p-power order in M,
    for p != 3, are central.
    """
    dmask = np.asarray(getattr(D, "mask", D), bool)
    hmask = np.asarray(getattr(H, "mask", H), bool)
    dm, hm = np.flatnonzero(dmask), np.flatnonzero(hmask)
    zq = center(Q)
    if not (dmask <= zq.mask).all():
        raise NotCentralFactor("D is not contained in the center")
    if (dmask & hmask).sum() != 1 or not dmask[Q.e]:
        raise NotCentralFactor("D and H do not meet exactly in the identity")
    prods = Q.table[np.ix_(dm, hm)].ravel()
    if len(np.unique(prods)) != Q.n or len(prods) != Q.n:
        raise NotCentralFactor("D x H -> Q is not a bijection")

    M = mult_group(Q, cap)
    ZM = group_center(M)
    MD = subgroup_generated(Q, dm, cap)
    MH = subgroup_generated(Q, hm, cap)
    central = MD.issubgroup(ZM)
    meet = sum(1 for row in MD.elements if row in MH)
    products = set()
    for a in MD.elements:
        products.update(r.tobytes() for r in a[MH.elements])
    whole = len(products) == M.order
    # a -> L(a) on D: bijective onto M(D) and multiplicative
    L = Q.table[dm].astype(np.int64)
    iso = MD.order == len(dm) and all(row in MD for row in L)
    if iso:
        T = Q.table
        for i, a in enumerate(dm):
            comp = L[i][L]  # L(a) L(b) for every b in D
            if not np.array_equal(comp, T[T[a, dm]].astype(np.int64)):
                iso = False
                break
    orders_m = element_orders(M)
    p_central = {}
    for p in sorted({q for o in orders_m for q in _primes(int(o))} - {3}):
        rows = M.elements[[_prime_power(int(o), p) for o in orders_m]]
        p_central[p] = all(row in ZM for row in rows)
    return CentralFactorReport(M.order, MD.order, MH.order, central, meet == 1, whole, iso, p_central)


def _primes(m: int) -> list[int]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def check_three_loop_group(Q: CayleyLoop, cap: int = DEFAULT_CAP) -> bool:
    """For a CML whose elements all have 3-power order, M is a 3-group."""
    if not all(_prime_power(int(o), 3) for o in orders(Q)):
        raise PreconditionViolated("not every element has 3-power order")
    return is_p_group(mult_group(Q, cap), 3)


def stabilizer_of_identity(Q: CayleyLoop, M: PermGroup) -> np.ndarray:
    E = M.elements
    return E[E[:, Q.e] == Q.e]


def group_report(Q: CayleyLoop, cap: int = DEFAULT_CAP) -> dict:
    M = mult_group(Q, cap)
    ZM = group_center(M)
    Md = derived_subgroup(M, cap)
    census = element_order_census(M)
    return {
        "census": {str(k): v for k, v in census.items()},
        "center_order": ZM.order,
        "degree": Q.n,
        "derived_order": Md.order,
        "is_3_group": is_p_group(M, 3),
        "order": M.order,
    }
