"""JSON descriptors for structured CMLs and their subloops."""
from __future__ import annotations

import json
from pathlib import Path

from ..loop import read_table, validate_loop
from .elements import StructuredCML, element_from_json, element_to_json
from .subloops import StructuredSubloop, make_subloop


def load_structured(desc, base_dir=".") -> StructuredCML:
    """Build a StructuredCML from a descriptor dict or a path to one.

    ``{"summands": [3, 5], "finite_part": {"file": "c.tbl"}}``; the finite
    part may instead be ``{"builtin": "cml81"}`` or ``{"table": [[...]]}``.
    """
    from ..catalog import builtin

    if isinstance(desc, (str, Path)):
        path = Path(desc)
        base_dir = path.parent
        desc = json.loads(path.read_text())
    fp = desc.get("finite_part", {"builtin": "cyclic:1"})
    if "file" in fp:
        C = read_table(Path(base_dir) / fp["file"])
    elif "builtin" in fp:
        C = builtin(fp["builtin"])
    elif "table" in fp:
        C = validate_loop(fp["table"])
    else:
        raise ValueError("finite_part needs one of: file, builtin, table")
    return StructuredCML(desc.get("summands", []), C)


def subloop_from_json(Q: StructuredCML, obj) -> StructuredSubloop:
    if not isinstance(obj, dict):
        raise ValueError("subloop descriptor must be an object")
    extra = set(obj) - {"full", "residual_gens", "residual_order"}
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)}")
    gens = [element_from_json(Q, g) for g in obj.get("residual_gens", [])]
    return make_subloop(Q, obj.get("full", []), gens)


def _small_generating_set(H: StructuredSubloop):
    Q = H.owner
    gens = []
    span = make_subloop(Q, H.full, [])
    for a in sorted(H.residual):
        if a not in span:
            gens.append(a)
            span = make_subloop(Q, H.full, gens)
            if span == H:
                break
    return gens


def subloop_to_json(H: StructuredSubloop) -> dict:
    return {
        "full": sorted(H.full),
        "residual_gens": [element_to_json(a) for a in _small_generating_set(H)],
        "residual_order": len(H.residual),
    }
