"""Exact elements of D x C, where D is a sum of quasicyclic groups and C a finite CML.

An element stores one fraction mod 1 per quasicyclic summand Z(p^inf) and an
index into the finite part.  The divisible part is central, so products are
componentwise: fractions add mod 1 and finite parts multiply in C.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from ..loop import CayleyLoop, is_cml, order_of, power
from ..subloops import inner_generators

INFINITE = math.inf


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def _valuation(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


@dataclass(frozen=True, order=True)
class StructuredElement:
    div: tuple[Fraction, ...]
    fin: int

    def __repr__(self):
        parts = ", ".join(format_fraction(f) for f in self.div)
        return f"({parts}; {self.fin})"


class StructuredCML:
    """Q = Z(p1^inf) x ... x Z(pr^inf) x C."""

    def __init__(self, summands, finite_part: CayleyLoop, verify: bool = True):
        summands = tuple(int(p) for p in summands)
        for p in summands:
            if not _is_prime(p):
                raise ValueError(f"summand {p} is not prime")
        if verify and not finite_part.cml:
            ok, wit = is_cml(finite_part)
            if not ok:
                raise ValueError(f"finite part is not a commutative Moufang loop: {wit}")
            finite_part.cml = True
        self.summands = summands
        self.C = finite_part

    @property
    def finite_part(self) -> CayleyLoop:
        return self.C

    @property
    def r(self) -> int:
        return len(self.summands)

    def __repr__(self):
        parts = [f"Z({p}^inf)" for p in self.summands] + [self.C.name or f"C{self.C.n}"]
        return " x ".join(parts)

    @cached_property
    def identity(self) -> StructuredElement:
        return StructuredElement(tuple(Fraction(0) for _ in self.summands), self.C.e)

    @cached_property
    def inner(self) -> np.ndarray:
        """Distinct inner mappings of C; they act on the finite coordinate only."""
        return inner_generators(self.C)

    def element(self, div=(), fin: int | None = None) -> StructuredElement:
        div = list(div) + [0] * (self.r - len(div))
        if len(div) != self.r:
            raise ValueError(f"expected {self.r} fractions")
        fracs = []
        for f, p in zip(div, self.summands):
            q = parse_fraction(f) if isinstance(f, str) else Fraction(f)
            q -= math.floor(q)
            if q.denominator != p ** _valuation(q.denominator, p):
                raise ValueError(f"{q} is not a {p}-power fraction")
            fracs.append(q)
        fin = self.C.e if fin is None else int(fin)
        if not 0 <= fin < self.C.n:
            raise IndexError("finite index out of range")
        return StructuredElement(tuple(fracs), fin)

    def level(self, a: StructuredElement) -> tuple[int, ...]:
        """Per-summand exponent k with denominator p^k."""
        return tuple(_valuation(f.denominator, p) for f, p in zip(a.div, self.summands))

    def levels(self, elements) -> tuple[int, ...]:
        out = [0] * self.r
        for a in elements:
            out = [max(u, v) for u, v in zip(out, self.level(a))]
        return tuple(out)


def _mod1(q: Fraction) -> Fraction:
    return q - math.floor(q)


def s_mul(Q: StructuredCML, a: StructuredElement, b: StructuredElement) -> StructuredElement:
    div = tuple(_mod1(x + y) for x, y in zip(a.div, b.div))
    return StructuredElement(div, int(Q.C.table[a.fin, b.fin]))


def s_inv(Q: StructuredCML, a: StructuredElement) -> StructuredElement:
    return StructuredElement(tuple(_mod1(-x) for x in a.div), int(Q.C.inv[a.fin]))


def s_pow(Q: StructuredCML, a: StructuredElement, k: int) -> StructuredElement:
    return StructuredElement(tuple(_mod1(k * x) for x in a.div), power(Q.C, a.fin, k))


def s_order(Q: StructuredCML, a: StructuredElement) -> int:
    return math.lcm(order_of(Q.C, a.fin), *(x.denominator for x in a.div))


def s_associator(Q: StructuredCML, a, b, c) -> StructuredElement:
    """(a,b,c) solved from ab.c = (a.bc)(a,b,c)."""
    lhs = s_mul(Q, s_mul(Q, a, b), c)
    rhs = s_mul(Q, a, s_mul(Q, b, c))
    return s_mul(Q, s_inv(Q, rhs), lhs)


# text form ------------------------------------------------------------------

_FRACTION = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)(?:\s*\^\s*(\d+))?)?\s*$")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"0"``, ``"a/b"`` or ``"a/p^k"``."""
    m = _FRACTION.match(str(text))
    if not m:
        raise ValueError(f"bad fraction {text!r}")
    num, base, exp = m.groups()
    if base is None:
        return Fraction(int(num))
    den = int(base) ** int(exp) if exp else int(base)
    return Fraction(int(num), den)


def format_fraction(q: Fraction) -> str:
    if q == 0:
        return "0"
    return f"{q.numerator}/{q.denominator}"


def element_to_json(a: StructuredElement) -> dict:
    return {"div": [format_fraction(f) for f in a.div], "fin": a.fin}


def element_from_json(Q: StructuredCML, obj) -> StructuredElement:
    return Q.element(obj.get("div", []), obj.get("fin"))


# vectorized coordinates -----------------------------------------------------

class Grid:
    """Mixed-radix integer encoding of the finite subloop with denominators
    dividing p_i^levels[i].

    Index = ((n_1 * m_2 + n_2) * ... ) * |C| + c, where a_i = n_i / m_i.
    The identity has index ``C.e``.
    """

    def __init__(self, Q: StructuredCML, levels):
        self.Q = Q
        self.levels = tuple(int(k) for k in levels)
        self.mods = [p ** k for p, k in zip(Q.summands, self.levels)]
        self.nc = Q.C.n
        self.size = math.prod(self.mods) * self.nc

    def decode(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        c = idx % self.nc
        rest = idx // self.nc
        ds = []
        for m in reversed(self.mods):
            ds.append(rest % m)
            rest = rest // m
        return ds[::-1], c

    def encode(self, ds, c):
        out = np.zeros(np.broadcast(*ds, c).shape if ds else np.shape(c), dtype=np.int64)
        for d, m in zip(ds, self.mods):
            out = out * m + d
        return out * self.nc + c

    def mul(self, a, b):
        da, ca = self.decode(a)
        db, cb = self.decode(b)
        ds = [(x + y) % m for x, y, m in zip(da, db, self.mods)]
        return self.encode(ds, self.Q.C.table[ca, cb].astype(np.int64))

    def inv(self, a):
        da, ca = self.decode(a)
        ds = [(-x) % m for x, m in zip(da, self.mods)]
        return self.encode(ds, self.Q.C.inv[ca].astype(np.int64))

    def apply_fin(self, a, perm):
        """Apply a permutation of C to the finite coordinate."""
        da, ca = self.decode(a)
        return self.encode(da, np.asarray(perm)[ca])

    def index_of(self, elements) -> np.ndarray:
        out = np.empty(len(elements), dtype=np.int64)
        for j, a in enumerate(elements):
            ds = []
            for f, m in zip(a.div, self.mods):
                scaled = f * m
                if scaled.denominator != 1:
                    raise ValueError(f"{a} does not fit grid levels {self.levels}")
                ds.append(int(scaled))
            out[j] = self.encode(ds, a.fin) if ds else a.fin
        return out

    def elements_of(self, idx) -> list[StructuredElement]:
        ds, c = self.decode(idx)
        out = []
        for j in range(len(c)):
            div = tuple(Fraction(int(d[j]), m) for d, m in zip(ds, self.mods))
            out.append(StructuredElement(div, int(c[j])))
        return out

    def all_indices(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)


def _grow_kernel(grid: Grid, N: np.ndarray, g) -> np.ndarray:
    """Subgroup of the divisible coordinates generated by N and g.

    ``g`` has finite coordinate e; its multiples j*g for j below the
    exponent of the grid are formed at once and cut at the first one in N.
    """
    ds, _ = grid.decode(np.int64(g))
    js = np.arange(math.lcm(1, *grid.mods), dtype=np.int64)
    multiples = grid.encode([(int(d) * js) % m for d, m in zip(ds, grid.mods)], grid.Q.C.e)
    hits = np.flatnonzero(np.isin(multiples[1:], N))
    steps = multiples[: hits[0] + 1] if len(hits) else multiples
    return np.unique(grid.mul(steps[:, None], N[None, :]).ravel())


def close_indices(grid: Grid, seeds, cap: int = 1_000_000) -> np.ndarray:
    """Sorted indices of the subloop generated by ``seeds`` inside ``grid``.

    The divisible coordinates are central, so the subloop H is determined
    by its image P in C, one representative per element of P, and the
    kernel N = H meet D.  Closing over pairs of representatives costs
    |P|^2 products instead of |H|^2.
    """
    from ..errors import CapExceeded

    nc, e = grid.nc, grid.Q.C.e
    rep = np.full(nc, -1, dtype=np.int64)
    rep[e] = e
    N = np.array([e], dtype=np.int64)
    cand = np.asarray(seeds, dtype=np.int64).ravel()
    while True:
        changed = False
        c = cand % nc
        fresh = rep[c] < 0
        if fresh.any():
            cs, first = np.unique(c[fresh], return_index=True)
            rep[cs] = cand[fresh][first]
            changed = True
        if len(cand):
            diffs = grid.mul(cand, grid.inv(rep[c]))
            for d in np.unique(diffs[~np.isin(diffs, N)]):
                if not np.isin(d, N):
                    N = _grow_kernel(grid, N, d)
                    changed = True
        if len(N) * int((rep >= 0).sum()) > cap:
            raise CapExceeded(cap, len(N) * int((rep >= 0).sum()))
        if not changed:
            break
        R = rep[rep >= 0]
        cand = np.concatenate([grid.mul(R[:, None], R[None, :]).ravel(), grid.inv(R)])
    R = rep[rep >= 0]
    return np.unique(grid.mul(R[:, None], N[None, :]).ravel())
