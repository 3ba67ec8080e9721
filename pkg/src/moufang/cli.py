"""Command-line entry point ``cml``.

Exit codes: 0 success, 1 a mathematical property was violated, 2 usage or
input error.  JSON reports have sorted keys and contain no floats.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import DEFAULT_SEED, __version__
from .catalog import builtin, catalog
from .errors import LoopError, NoComplementFound, NotDescending
from .loop import check_identities, format_table, is_cml, read_table, write_table

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _plain(obj):
    """Convert a report to JSON-safe exact values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, Fraction):
        from .mincond import format_fraction
        return format_fraction(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf"
        raise TypeError(f"float {obj} in report")
    if hasattr(obj, "div") and hasattr(obj, "fin"):
        from .mincond import element_to_json
        return element_to_json(obj)
    return obj


def _emit(args, report: dict, out=None):
    out = out or sys.stdout
    report = _plain(report)
    if args.json:
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return
    for key in sorted(report):
        val = report[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        out.write(f"{key}: {val}\n")


# inputs -----------------------------------------------------------------------

def _loop(args):
    if args.builtin and args.file:
        raise UsageError("give exactly one of --builtin or --file")
    if args.builtin:
        return builtin(args.builtin)
    if args.file:
        return read_table(args.file)
    raise UsageError("an input loop is required (--builtin or --file)")


def _structured(args):
    from .mincond import StructuredCML, load_structured

    if args.descriptor:
        if args.builtin or args.file or args.summands:
            raise UsageError("--descriptor excludes --builtin, --file and --summands")
        return load_structured(args.descriptor)
    if args.summands is None:
        raise UsageError("a structured input is required (--descriptor or --summands with --builtin/--file)")
    summands = [int(p) for p in args.summands.split(",") if p.strip()]
    C = _loop(args) if (args.builtin or args.file) else builtin("cyclic:1")
    return StructuredCML(summands, C)


def _input_label(args) -> dict:
    out = {}
    for key in ("builtin", "file", "descriptor", "summands"):
        val = getattr(args, key, None)
        if val:
            out[key] = str(val)
    return out


def _elements(text: str | None, n: int) -> list[int]:
    if not text:
        return []
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad element list {text!r}") from exc
    for v in vals:
        if not 0 <= v < n:
            raise UsageError(f"element {v} out of range [0, {n})")
    return vals


def _members(H) -> list[int]:
    return [int(x) for x in H.members]


# verbs ------------------------------------------------------------------------

def cmd_validate(args):
    Q = _loop(args)
    ok, wit = is_cml(Q)
    return {
        "commutative": Q.is_commutative,
        "identity": Q.e,
        "is_cml": ok,
        "name": Q.name,
        "order": Q.n,
        "witness": list(wit) if wit else None,
    }, EXIT_OK


def cmd_info(args):
    from .loop import is_associative
    from .structure import structure_report

    Q = _loop(args)
    rep = structure_report(Q)
    rep["associative"] = is_associative(Q)
    rep["commutative"] = Q.is_commutative
    rep["name"] = Q.name
    return rep, EXIT_OK


def cmd_check_identities(args):
    Q = _loop(args)
    rep = check_identities(Q, seed=args.seed, exhaustive=args.exhaustive)
    return rep.to_dict(), EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_center(args):
    from .structure import center

    Q = _loop(args)
    Z = center(Q)
    return {"members": _members(Z), "order": Z.order}, EXIT_OK


def cmd_series(args):
    from .structure import upper_central_series

    Q = _loop(args)
    s = upper_central_series(Q)
    return {
        "class": s.nilpotency_class,
        "orders": s.orders,
        "terms": [_members(t) for t in s.terms],
    }, EXIT_OK


def cmd_decompose(args):
    from .structure import p_decomposition

    Q = _loop(args)
    dec = p_decomposition(Q)
    return {
        "components": {str(p): {"members": _members(H), "order": H.order}
                       for p, H in sorted(dec.components.items())},
        "orders": {str(p): o for p, o in sorted(dec.orders().items())},
    }, EXIT_OK


def cmd_subloops(args):
    from .subloops import all_subloops, is_normal

    Q = _loop(args)
    subs = all_subloops(Q, cap=args.cap or 50_000)
    listing = []
    census = {}
    for H in subs:
        normal = is_normal(Q, H)[0]
        census[str(H.order)] = census.get(str(H.order), 0) + 1
        listing.append({"members": _members(H), "normal": normal, "order": H.order})
    return {"census": census, "count": len(subs), "subloops": listing}, EXIT_OK


def cmd_normal_closure(args):
    from .subloops import normal_closure

    Q = _loop(args)
    H = normal_closure(Q, _elements(args.elements, Q.n))
    return {"members": _members(H), "order": H.order}, EXIT_OK


def cmd_cogenerators(args):
    from .subloops import cogenerator_subloop, is_cogenerating

    Q = _loop(args)
    B = cogenerator_subloop(Q)
    ok, wit = is_cogenerating(Q, B, trials=args.trials, seed=args.seed)
    return {
        "cogenerating": ok,
        "members": _members(B),
        "order": B.order,
        "witness": _members(wit) if wit is not None else None,
    }, EXIT_OK if ok else EXIT_VIOLATION


def cmd_multgroup(args):
    from .multgroup import DEFAULT_CAP, check_center_formula, group_report, mult_group

    Q = _loop(args)
    cap = args.cap or DEFAULT_CAP
    rep = group_report(Q, cap)
    ok, wit = check_center_formula(Q, mult_group(Q, cap))
    rep["center_formula"] = ok
    rep["center_formula_witness"] = wit
    return rep, EXIT_OK if ok else EXIT_VIOLATION


def _factor_series(Q):
    from .mincond import quasicyclic_factor_series

    return [str(t.factor) for t in quasicyclic_factor_series(Q)[1:]]


def cmd_structured(args):
    from .mincond import (
        cogenerator_subloop,
        is_cogenerating,
        relevant_primes,
        socle,
    )

    Q = _structured(args)
    B = cogenerator_subloop(Q)
    ok, wit = is_cogenerating(Q, B, trials=args.trials, seed=args.seed)
    return {
        "cogenerating": ok,
        "cogenerator_order": B.order,
        "factor_series": _factor_series(Q),
        "finite_order": Q.C.n,
        "socle_orders": {str(p): socle(Q, p).order for p in relevant_primes(Q)},
        "summands": list(Q.summands),
        "witness": wit[0] if wit else None,
    }, EXIT_OK if ok else EXIT_VIOLATION


def cmd_truncate(args):
    from .mincond import predicted_truncation_structure, truncate
    from .structure import upper_central_series

    Q = _structured(args)
    T = truncate(Q, args.k, cap=args.cap or 6000)
    if args.output:
        write_table(T.loop, args.output)
    ok, wit = is_cml(T.loop)
    series = upper_central_series(T.loop)
    measured = {
        "center_order": series.terms[1].order,
        "class": series.nilpotency_class,
        "series_orders": series.orders,
    }
    predicted = predicted_truncation_structure(Q, args.k)
    match = all(predicted[k] == v for k, v in measured.items())
    rep = {
        "is_cml": ok,
        "k": args.k,
        "matches_prediction": match,
        "measured": measured,
        "order": T.loop.n,
        "predicted": predicted,
    }
    if args.table and not args.json:
        sys.stdout.write(format_table(T.loop))
    return rep, EXIT_OK if ok and match else EXIT_VIOLATION


def cmd_complement(args):
    from .mincond import divisible_complement, subloop_from_json, subloop_to_json, trivial, verify_direct

    Q = _structured(args)
    if args.subloop:
        text = args.subloop
        if Path(text).exists():
            text = Path(text).read_text()
        try:
            B = subloop_from_json(Q, json.loads(text))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad subloop descriptor: {exc}") from exc
    else:
        B = trivial(Q)
    try:
        K = divisible_complement(Q, B)
    except NoComplementFound as exc:
        return {"found": False, "reason": str(exc)}, EXIT_VIOLATION
    checks = {}
    for k in range(args.k + 1):
        ok, wit = verify_direct(Q, K, k)
        checks[str(k)] = {"passed": ok, "witness": wit}
    ok = all(c["passed"] for c in checks.values())
    return {
        "complement": subloop_to_json(K),
        "found": True,
        "verified": checks,
    }, EXIT_OK if ok else EXIT_VIOLATION


def cmd_chain_test(args):
    if args.descriptor or args.summands is not None:
        from .mincond import random_descending_chain, s_chain_stabilizes

        Q = _structured(args)
        rng = np.random.default_rng(args.seed)
        indices = []
        for _ in range(args.trials):
            chain = random_descending_chain(Q, rng)
            indices.append(s_chain_stabilizes(chain))
        return {"chains": len(indices), "indices": indices, "stabilized": True}, EXIT_OK

    from .subloops import chain_stabilizes

    Q = _loop(args)
    if not args.chain:
        raise UsageError("--chain is required for finite loops")
    text = args.chain
    if Path(text).exists():
        text = Path(text).read_text()
    try:
        chain = json.loads(text)
        chain = [_elements(",".join(str(x) for x in gens), Q.n) for gens in chain]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad chain: {exc}") from exc
    try:
        index = chain_stabilizes(Q, chain)
    except NotDescending as exc:
        return {"descending": False, "position": exc.position}, EXIT_VIOLATION
    return {"descending": True, "index": index}, EXIT_OK


def cmd_catalog(args):
    return {"loops": catalog()}, EXIT_OK


VERBS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "check-identities": cmd_check_identities,
    "center": cmd_center,
    "series": cmd_series,
    "decompose": cmd_decompose,
    "subloops": cmd_subloops,
    "normal-closure": cmd_normal_closure,
    "cogenerators": cmd_cogenerators,
    "multgroup": cmd_multgroup,
    "structured": cmd_structured,
    "truncate": cmd_truncate,
    "complement": cmd_complement,
    "chain-test": cmd_chain_test,
    "catalog": cmd_catalog,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--builtin", help="catalog loop, e.g. cml81, cyclic:9, cyclic:9*cml81")
    common.add_argument("--file", help="Cayley table file")
    common.add_argument("--descriptor", help="structured CML descriptor (JSON file)")
    common.add_argument("--summands", help="quasicyclic primes, e.g. 3,5 (finite part from --builtin/--file)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")
    common.add_argument("--cap", type=int, default=None, help="enumeration cap")
    common.add_argument("--threads", type=int, default=None, help="numba thread count")
    common.add_argument("--exhaustive", action="store_true", help="full four-variable identity scan")

    parser = _Parser(prog="cml", description="Commutative Moufang loop toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in VERBS:
        p = sub.add_parser(verb, parents=[common])
        if verb == "normal-closure":
            p.add_argument("--elements", required=True, help="comma separated element indices")
        if verb in ("cogenerators", "structured", "chain-test"):
            p.add_argument("--trials", type=int, default=200 if verb != "chain-test" else 100)
        if verb == "truncate":
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--output", help="write the truncation table here")
            p.add_argument("--table", action="store_true", help="print the table (text mode)")
        if verb == "complement":
            p.add_argument("--subloop", help="subloop descriptor (JSON text or file)")
            p.add_argument("--k", type=int, default=2, help="verify on truncations 0..k")
        if verb == "chain-test":
            p.add_argument("--chain", help="JSON array of generator lists (text or file)")
    return parser


def _set_threads(n):
    if n is None:
        return
    if n < 1:
        raise UsageError("--threads must be positive")
    from . import kernels

    if kernels.BACKEND == "numba":
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _set_threads(args.threads)
        report, code = VERBS[args.verb](args)
    except (UsageError, LoopError, ValueError, OSError, KeyError) as exc:
        # bad tables, unknown names, caps and preconditions are input problems
        sys.stderr.write(f"cml {args.verb}: error: {exc}\n")
        return EXIT_USAGE
    full = {
        "command": args.verb,
        "input": _input_label(args),
        "result": report,
        "seed": args.seed,
        "version": __version__,
    }
    if args.json:
        _emit(args, full)
    else:
        _emit(args, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
