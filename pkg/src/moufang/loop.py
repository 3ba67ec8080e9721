"""Finite loops given by Cayley tables, and the associator calculus on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import NoIdentity, NotLatinSquare, NotNormal

INDEX_DTYPE = np.int32


class CayleyLoop:
    """A finite loop stored as an ``n x n`` table of element indices.

    Instances are treated as immutable: the table is made read-only and all
    derived tables are cached on first use.
    """

    def __init__(self, table, e: int, name: str | None = None, cml: bool = False):
        table = np.array(table, dtype=INDEX_DTYPE)
        table.setflags(write=False)
        self.table = table
        self.n = table.shape[0]
        self.e = int(e)
        self.name = name
        self.cml = cml

    def __repr__(self):
        label = self.name or "loop"
        return f"CayleyLoop({label}, n={self.n}, e={self.e})"

    def __len__(self):
        return self.n

    @cached_property
    def ldiv(self) -> np.ndarray:
        """``ldiv[a, b]`` is the unique x with a.x = b."""
        out = np.empty_like(self.table)
        rows = np.arange(self.n)[:, None]
        out[rows, self.table] = np.arange(self.n, dtype=INDEX_DTYPE)[None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def inv(self) -> np.ndarray:
        out = np.ascontiguousarray(self.ldiv[:, self.e])
        out.setflags(write=False)
        return out

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(orders(self)))


def validate_loop(table, name: str | None = None) -> CayleyLoop:
    """Check that ``table`` is a Latin square with a two-sided identity."""
    arr = np.asarray(table)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"table must be square, got shape {arr.shape}")
    n = arr.shape[0]
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("table entries must be integers")
    if arr.min() < 0 or arr.max() >= n:
        raise ValueError(f"table entries must lie in [0, {n})")
    expected = np.arange(n)
    rows_ok = (np.sort(arr, axis=1) == expected).all(axis=1)
    if not rows_ok.all():
        raise NotLatinSquare("row", int(np.flatnonzero(~rows_ok)[0]))
    cols_ok = (np.sort(arr, axis=0) == expected[:, None]).all(axis=0)
    if not cols_ok.all():
        raise NotLatinSquare("column", int(np.flatnonzero(~cols_ok)[0]))
    left = (arr == expected[None, :]).all(axis=1)
    right = (arr == expected[:, None]).all(axis=0)
    both = np.flatnonzero(left & right)
    if len(both) == 0:
        raise NoIdentity("no two-sided identity element")
    return CayleyLoop(arr, int(both[0]), name=name)


def mul(Q: CayleyLoop, a: int, b: int) -> int:
    return int(Q.table[a, b])


def left_divide(Q: CayleyLoop, a: int, b: int) -> int:
    return int(Q.ldiv[a, b])


def inverse(Q: CayleyLoop, a: int) -> int:
    return int(Q.inv[a])


def power_map(Q: CayleyLoop, k: int) -> np.ndarray:
    """Left-normed powers ``x -> x^k`` for every element at once."""
    T = Q.table
    base = np.arange(Q.n) if k >= 0 else Q.inv.astype(np.intp)
    out = np.full(Q.n, Q.e, dtype=np.intp)
    for _ in range(abs(k)):
        out = T[out, base]
    return out


def right_power_map(Q: CayleyLoop, k: int) -> np.ndarray:
    """Right-normed powers ``x -> x(x(...x))``; used to cross-check power_map."""
    T = Q.table
    base = np.arange(Q.n) if k >= 0 else Q.inv.astype(np.intp)
    out = np.full(Q.n, Q.e, dtype=np.intp)
    for _ in range(abs(k)):
        out = T[base, out]
    return out


def power(Q: CayleyLoop, a: int, k: int) -> int:
    x = Q.e
    base = a if k >= 0 else int(Q.inv[a])
    for _ in range(abs(k)):
        x = int(Q.table[x, base])
    return x


def orders(Q: CayleyLoop) -> np.ndarray:
    """Order of every element (least m > 0 with x^m = e)."""
    out = np.zeros(Q.n, dtype=np.int64)
    cur = np.arange(Q.n)
    for m in range(1, Q.n + 1):
        hit = (cur == Q.e) & (out == 0)
        out[hit] = m
        if out.all():
            return out
        cur = Q.table[cur, np.arange(Q.n)]
    raise AssertionError("element order exceeds loop order")


def order_of(Q: CayleyLoop, a: int) -> int:
    x, m = a, 1
    while x != Q.e:
        x = int(Q.table[x, a])
        m += 1
    return m


def associator(Q: CayleyLoop, a: int, b: int, c: int) -> int:
    """The element (a,b,c) with ab.c = (a.bc)(a,b,c)."""
    T = Q.table
    return int(Q.ldiv[T[a, T[b, c]], T[T[a, b], c]])


def is_associative(Q: CayleyLoop) -> bool:
    return kernels.witness(kernels.nonassoc_triple(Q.table)) is None


def nonassociative_triple(Q: CayleyLoop):
    return kernels.witness(kernels.nonassoc_triple(Q.table))


def is_cml(Q: CayleyLoop):
    """Return ``(ok, witness)``.

    The witness is ``("commutativity", (a, b))`` or ``("moufang", (x, y, z))``
    for the first pair/triple that fails, or None.
    """
    if not Q.is_commutative:
        a, b = np.argwhere(Q.table != Q.table.T)[0]
        return False, ("commutativity", (int(a), int(b)))
    hit = kernels.witness(kernels.cml_violation(Q.table))
    if hit is not None:
        return False, ("moufang", hit)
    return True, None


def translation(Q: CayleyLoop, x: int) -> np.ndarray:
    """Images of z -> x.z."""
    return np.array(Q.table[x], dtype=INDEX_DTYPE)


def inner_mapping(Q: CayleyLoop, x: int, y: int) -> np.ndarray:
    """L(x,y) = L(xy)^-1 L(x) L(y), as an image array."""
    T = Q.table
    return np.array(Q.ldiv[T[x, y], T[x][T[y]]], dtype=INDEX_DTYPE)


def inner_mapping_rows(Q: CayleyLoop, x: int) -> np.ndarray:
    """All L(x, y) for fixed x; row y holds the images of L(x, y)."""
    T = Q.table
    return np.ascontiguousarray(Q.ldiv[T[x][:, None], T[x][T]]).astype(INDEX_DTYPE)


# identity checks ------------------------------------------------------------

EXPONENT_GRID = (-2, -1, 0, 1, 2, 3)
EXHAUSTIVE_LIMIT = 40  # n above this samples the four-variable identity
POWER_GRID_LIMIT = 81  # n above this samples triples for the power identity


@dataclass
class IdentityResult:
    name: str
    passed: bool
    checked: int
    exhaustive: bool
    witness: tuple | None = None

    def to_dict(self):
        return {
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass
class IdentityReport:
    results: list[IdentityResult] = field(default_factory=list)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "seed": self.seed,
            "identities": {r.name: r.to_dict() for r in self.results},
        }


def _triples(n, budget, rng):
    if n <= POWER_GRID_LIMIT:
        idx = np.arange(n)
        grid = np.stack(np.meshgrid(idx, idx, idx, indexing="ij"), axis=-1)
        return grid.reshape(-1, 3).astype(np.int64), True
    return rng.integers(0, n, size=(budget, 3), dtype=np.int64), False


def check_identities(Q: CayleyLoop, sample_budget: int = 100_000, seed: int = 0,
                     exhaustive: bool = False) -> IdentityReport:
    """Run the standard CML associator identities over ``Q``.

    * ``inner_mapping``: L(x,y)z = z(z,y,x), all triples.
    * ``associator_powers``: (x^p,y^r,z^s) = (x,y,z)^(prs) for p, r, s in
      EXPONENT_GRID; all triples for n <= 81, else ``sample_budget`` triples.
    * ``associator_cube``: (x,y,z)^3 = e, all triples.
    * ``associator_expansion``: (xy,u,v) = (x,u,v)((x,u,v),x,y)(y,u,v)((y,u,v),y,x)
      with left-normed products; all quadruples when n <= 40 or
      ``exhaustive``, else ``sample_budget`` seeded quadruples.

    The inverse property x^-1(xy) = y is reported as ``inverse_property``.
    """
    T, LD, n = Q.table, Q.ldiv, Q.n
    rng = np.random.default_rng(seed)
    report = IdentityReport(seed=seed)

    hit = kernels.witness(kernels.ip_violation(T, Q.inv))
    report.results.append(IdentityResult("inverse_property", hit is None, n * n, True, hit))

    hit = kernels.witness(kernels.inner_identity_violation(T, LD))
    report.results.append(IdentityResult("inner_mapping", hit is None, n ** 3, True, hit))

    exps = np.array(EXPONENT_GRID, dtype=np.int64)
    P = np.stack([power_map(Q, int(k)) for k in exps]).astype(np.int64)
    prods = [a * b * c for a in exps for b in exps for c in exps]
    kmin, kmax = min(prods), max(prods)
    K = np.stack([power_map(Q, k) for k in range(kmin, kmax + 1)]).astype(np.int64)
    triples, full = _triples(n, sample_budget, rng)
    hit = kernels.witness(kernels.assoc_power_violation(T, LD, P, exps, K, kmin, triples))
    report.results.append(IdentityResult(
        "associator_powers", hit is None, len(triples) * len(exps) ** 3, full, hit))

    hit = kernels.witness(kernels.assoc_cube_violation(T, LD, Q.e))
    report.results.append(IdentityResult("associator_cube", hit is None, n ** 3, True, hit))

    if exhaustive or n <= EXHAUSTIVE_LIMIT:
        hit = kernels.witness(kernels.expansion_violation_all(T, LD))
        checked, full = n ** 4, True
    else:
        quads = rng.integers(0, n, size=(sample_budget, 4), dtype=np.int64)
        hit = kernels.witness(kernels.expansion_violation_sample(T, LD, quads))
        checked, full = sample_budget, False
    report.results.append(IdentityResult("associator_expansion", hit is None, checked, full, hit))
    return report


# constructions --------------------------------------------------------------

def direct_product(Q1: CayleyLoop, Q2: CayleyLoop, name: str | None = None) -> CayleyLoop:
    """Componentwise product; element (i, j) has index ``i * Q2.n + j``."""
    n2 = Q2.n
    A = Q1.table.astype(np.int64)
    B = Q2.table.astype(np.int64)
    table = (A[:, None, :, None] * n2 + B[None, :, None, :]).reshape(Q1.n * n2, Q1.n * n2)
    if name is None and Q1.name and Q2.name:
        name = f"{Q1.name}*{Q2.name}"
    # the CML identities hold componentwise
    return CayleyLoop(table, Q1.e * n2 + Q2.e, name=name, cml=Q1.cml and Q2.cml)


def product_factor_masks(Q1: CayleyLoop, Q2: CayleyLoop):
    """Masks of the two embedded factors Q1 x {e} and {e} x Q2 inside Q1 x Q2."""
    n2 = Q2.n
    first = np.zeros(Q1.n * n2, bool)
    first[np.arange(Q1.n) * n2 + Q2.e] = True
    second = np.zeros(Q1.n * n2, bool)
    second[Q1.e * n2 + np.arange(n2)] = True
    return first, second


@dataclass
class Quotient:
    loop: CayleyLoop
    projection: np.ndarray  # element index -> coset index
    representatives: np.ndarray  # coset index -> smallest element in the coset


def quotient(Q: CayleyLoop, H, name: str | None = None) -> Quotient:
    """Quotient loop Q/H by a normal subloop (mask or SubloopSet).

    Coset products are checked for every pair of elements, so a subloop
    that is not normal is rejected even if its cosets partition Q.
    """
    mask = np.asarray(getattr(H, "mask", H), dtype=bool)
    if not mask[Q.e]:
        raise NotNormal("subloop must contain the identity")
    hit = kernels.witness(kernels.normality_witness(Q.table, Q.ldiv, mask))
    if hit is not None:
        raise NotNormal("subloop is not invariant under inner mappings", hit)
    hs = np.flatnonzero(mask)
    proj = np.full(Q.n, -1, dtype=np.int64)
    reps = []
    for x in range(Q.n):
        if proj[x] >= 0:
            continue
        coset = Q.table[x, hs]
        if (proj[coset] >= 0).any():
            raise NotNormal("left cosets overlap")
        proj[coset] = len(reps)
        reps.append(x)
    reps = np.array(reps)
    m = len(reps)
    qtable = proj[Q.table[reps[:, None], reps[None, :]]]
    # well-definedness: every representative pair lands in one coset
    if not np.array_equal(proj[Q.table], qtable[proj[:, None], proj[None, :]]):
        raise NotNormal("coset multiplication is not well defined")
    if name is None and Q.name:
        name = f"{Q.name}/H{int(mask.sum())}"
    loop = CayleyLoop(qtable, int(proj[Q.e]), name=name, cml=Q.cml)
    assert loop.n == m
    return Quotient(loop, proj, reps)


# text format ----------------------------------------------------------------

def format_table(Q: CayleyLoop) -> str:
    lines = []
    if Q.name:
        lines.append(f"# name: {Q.name}")
    lines.append(str(Q.n))
    width = len(str(Q.n - 1))
    for row in Q.table:
        lines.append(" ".join(str(int(v)).rjust(width) for v in row))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> CayleyLoop:
    name = None
    rows = []
    n = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("name:"):
                name = body[len("name:"):].strip() or None
            continue
        if n is None:
            n = int(line)
            continue
        rows.append([int(tok) for tok in line.split()])
    if n is None:
        raise ValueError("missing element count")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return validate_loop(np.array(rows, dtype=np.int64), name=name)


def read_table(path) -> CayleyLoop:
    return parse_table(Path(path).read_text())


def write_table(Q: CayleyLoop, path) -> None:
    Path(path).write_text(format_table(Q))
