"""Hot scan kernels with a numba backend and a pure-numpy fallback.

The backend is fixed at import time.  Set ``MOUFANG_DISABLE_NUMBA=1`` to
force the numpy path (numba is also skipped when it is not installed).
Both backends return identical results, including which witness is found
first, so reports do not depend on the backend.
"""
import os

from . import _numpy

_FLAG = os.environ.get("MOUFANG_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

_compiled = None
if not DISABLED:
    try:
        from . import _numba as _compiled
    except ImportError:  # numba missing
        _compiled = None

BACKEND = "numba" if _compiled is not None else "numpy"
impl = _compiled if _compiled is not None else _numpy

KERNELS = (
    "cml_violation",
    "nonassoc_triple",
    "central_mask",
    "associator_mask",
    "ip_violation",
    "inner_identity_violation",
    "assoc_power_violation",
    "assoc_cube_violation",
    "expansion_violation_all",
    "expansion_violation_sample",
    "normality_witness",
    "close_subloop",
    "row_hashes",
    "perm_orders",
)

cml_violation = impl.cml_violation
nonassoc_triple = impl.nonassoc_triple
central_mask = impl.central_mask
associator_mask = impl.associator_mask
ip_violation = impl.ip_violation
inner_identity_violation = impl.inner_identity_violation
assoc_power_violation = impl.assoc_power_violation
assoc_cube_violation = impl.assoc_cube_violation
expansion_violation_all = impl.expansion_violation_all
expansion_violation_sample = impl.expansion_violation_sample
normality_witness = impl.normality_witness
close_subloop = impl.close_subloop
row_hashes = impl.row_hashes
perm_orders = impl.perm_orders


def witness(arr):
    """Convert a kernel result (-1 filled when nothing was found) to a tuple or None."""
    if arr[0] < 0:
        return None
    return tuple(int(v) for v in arr)


def backends():
    """Available backend modules keyed by name, for cross-checks and benchmarks."""
    out = {"numpy": _numpy}
    if _compiled is not None:
        out["numba"] = _compiled
    else:
        try:
            from . import _numba as nb
        except ImportError:
            pass
        else:
            out["numba"] = nb
    return out
