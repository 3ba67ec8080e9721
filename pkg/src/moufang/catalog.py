"""Built-in loops."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import LoopError, UnknownName
from .loop import CayleyLoop, direct_product, is_cml

# canonical generators of cml81: (1,0,0,0), (0,1,0,0), (0,0,1,0)
CML81_GENERATORS = (27, 9, 3)
CML81_SIGNS = tuple(itertools.product((1, -1), repeat=3))


def cyclic(n: int) -> CayleyLoop:
    if n < 1:
        raise ValueError("cyclic order must be positive")
    idx = np.arange(n)
    return CayleyLoop((idx[:, None] + idx[None, :]) % n, 0, name=f"cyclic:{n}", cml=True)


def abelian(factors) -> CayleyLoop:
    """Direct product of cyclic groups of the given orders (invariant factors)."""
    factors = [int(f) for f in factors]
    if not factors:
        return CayleyLoop([[0]], 0, name="abelian:", cml=True)
    Q = cyclic(factors[0])
    for f in factors[1:]:
        Q = direct_product(Q, cyclic(f))
    Q.name = "abelian:" + ",".join(map(str, factors))
    return Q


def _cml81_table(signs) -> np.ndarray:
    s1, s2, s3 = signs
    el = np.array(list(itertools.product(range(3), repeat=4)))
    x, w = el[:, None, :3], el[:, None, 3]
    y, v = el[None, :, :3], el[None, :, 3]
    twist = s1 * (x[..., 0] - y[..., 0]) * (s2 * x[..., 1] * y[..., 2] - s3 * x[..., 2] * y[..., 1])
    top = (x + y) % 3
    low = (w + v + twist) % 3
    return ((top[..., 0] * 3 + top[..., 1]) * 3 + top[..., 2]) * 3 + low


@lru_cache(maxsize=None)
def cml81() -> CayleyLoop:
    """The order-81 nonassociative CML on Z_3^4.

    (x, w)(y, v) = (x + y, w + v + (x1 - y1)(x2 y3 - x3 y2)) mod 3.  The
    candidate is checked exhaustively; if it failed, the remaining sign
    patterns of the trilinear term would be tried in order.
    """
    for signs in CML81_SIGNS:
        Q = CayleyLoop(_cml81_table(signs), 0, name="cml81")
        ok, _ = is_cml(Q)
        if ok:
            Q.cml = True
            return Q
    raise LoopError("no sign variant of the cml81 candidate satisfies the Moufang identity")


def _parse_one(token: str) -> CayleyLoop:
    name, _, params = token.partition(":")
    name = name.strip().lower()
    if name == "cml81":
        if params:
            raise ValueError("cml81 takes no parameters")
        return cml81()
    if name in ("cyclic", "z"):
        return cyclic(int(params))
    if name == "abelian":
        return abelian([int(p) for p in params.split(",") if p.strip()])
    raise UnknownName(f"unknown builtin loop {token!r}")


def builtin(spec: str) -> CayleyLoop:
    """Build a catalog loop from a name such as ``cyclic:9``, ``abelian:3,9``,
    ``cml81`` or a product ``cyclic:9*cml81``."""
    parts = [p for p in spec.split("*") if p.strip()]
    if not parts:
        raise UnknownName("empty builtin name")
    Q = _parse_one(parts[0])
    for part in parts[1:]:
        Q = direct_product(Q, _parse_one(part))
    Q.name = spec if len(parts) > 1 else Q.name
    return Q


def catalog() -> list[dict]:
    return [
        {"name": "abelian:n1,n2,...", "description": "direct product of cyclic groups"},
        {"name": "cml81", "description": "order-81 nonassociative commutative Moufang loop"},
        {"name": "cyclic:n", "description": "cyclic group of order n"},
        {"name": "product: A*B", "description": "direct product of catalog entries, e.g. cyclic:9*cml81"},
        {"name": "structured", "description": "descriptor {\"summands\": [3], \"finite_part\": {\"builtin\": \"cml81\"}}"},
    ]
