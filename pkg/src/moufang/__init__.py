"""Finite and structured commutative Moufang loops."""
__version__ = "0.1.0"

DEFAULT_SEED = 0xC3

from .catalog import builtin, catalog, cml81, cyclic  # noqa: E402
from .loop import CayleyLoop, check_identities, is_cml, validate_loop  # noqa: E402
