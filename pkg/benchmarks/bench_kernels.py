"""Time the hot kernels on both backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each kernel runs once to warm up (numba compiles or loads its cache), then
the best of ``--repeat`` runs is reported.  Results must agree exactly.
"""
import argparse
import json
import time

import numpy as np

from moufang import kernels
from moufang.catalog import builtin, cml81
from moufang.loop import EXPONENT_GRID, power_map
from moufang.multgroup import mult_group


def cases():
    Q = cml81()
    T, LD = Q.table, Q.ldiv
    exps = np.array(EXPONENT_GRID, dtype=np.int64)
    P = np.stack([power_map(Q, int(k)) for k in exps]).astype(np.int64)
    prods = [a * b * c for a in exps for b in exps for c in exps]
    kmin = min(prods)
    K = np.stack([power_map(Q, k) for k in range(kmin, max(prods) + 1)]).astype(np.int64)
    idx = np.arange(81)
    triples = np.stack(np.meshgrid(idx, idx, idx, indexing="ij"), -1).reshape(-1, 3).astype(np.int64)
    quads = np.random.default_rng(0).integers(0, 81, size=(100_000, 4), dtype=np.int64)
    mask = np.zeros(81, bool)
    mask[[0, 27]] = True
    Z9C = builtin("cyclic:9*cml81")
    M = mult_group(Q).elements
    return {
        "cml_violation (81^3)": ("cml_violation", (T,)),
        "inner_identity_violation (81^3)": ("inner_identity_violation", (T, LD)),
        "assoc_power_violation (81^3 x 216)": ("assoc_power_violation", (T, LD, P, exps, K, kmin, triples)),
        "assoc_cube_violation (81^3)": ("assoc_cube_violation", (T, LD, Q.e)),
        "expansion_violation_sample (1e5)": ("expansion_violation_sample", (T, LD, quads)),
        "central_mask (729)": ("central_mask", (Z9C.table, np.arange(Z9C.n, dtype=np.int64))),
        "close_subloop": ("close_subloop", (T, Q.inv, mask)),
        "row_hashes (2187 x 81)": ("row_hashes", (M,)),
        "perm_orders (2187 x 81)": ("perm_orders", (M,)),
    }


def bench(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, np.asarray(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    mods = kernels.backends()
    rows = []
    for label, (name, kargs) in cases().items():
        row = {"kernel": label}
        outs = []
        for bname, mod in mods.items():
            t, out = bench(getattr(mod, name), kargs, args.repeat)
            row[bname + "_ms"] = round(t * 1000, 3)
            outs.append(out)
        row["agree"] = all(np.array_equal(outs[0], o) for o in outs[1:])
        if "numba_ms" in row:
            row["speedup"] = round(row["numpy_ms"] / max(row["numba_ms"], 1e-6), 1)
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    names = list(mods)
    head = f"{'kernel':38s}" + "".join(f"{n + ' ms':>12s}" for n in names) + f"{'speedup':>10s}  agree"
    print(head)
    for r in rows:
        line = f"{r['kernel']:38s}" + "".join(f"{r[n + '_ms']:12.2f}" for n in names)
        line += f"{r.get('speedup', ''):>10}  {r['agree']}"
        print(line)


if __name__ == "__main__":
    main()
