"""Pure-numpy versions of the scan kernels.

Scans are vectorized over the last two indices and looped over the first,
so peak memory stays at O(n^2) per step.
"""
import numpy as np

_NONE3 = np.full(3, -1, np.int64)


def _first(bad, prefix=()):
    idx = np.argwhere(bad)
    if len(idx) == 0:
        return None
    return np.array(list(prefix) + [int(v) for v in idx[0]], np.int64)


def _assoc(T, LD, a, b, c):
    return LD[T[a, T[b, c]], T[T[a, b], c]]


def cml_violation(T):
    n = T.shape[0]
    diag = T[np.arange(n), np.arange(n)]
    for x in range(n):
        bad = T[diag[x]][T] != T[T[x][:, None], T[x][None, :]]
        hit = _first(bad, (x,))
        if hit is not None:
            return hit
    return _NONE3.copy()


def nonassoc_triple(T):
    n = T.shape[0]
    for a in range(n):
        hit = _first(T[T[a]] != T[a][T], (a,))
        if hit is not None:
            return hit
    return _NONE3.copy()


def central_mask(T, cand):
    out = np.zeros(T.shape[0], bool)
    for x in cand:
        out[x] = np.array_equal(T[T[x]], T[x][T])
    return out


def associator_mask(T, LD):
    n = T.shape[0]
    out = np.zeros(n, bool)
    for a in range(n):
        out[LD[T[a][T], T[T[a]]]] = True
    return out


def ip_violation(T, inv):
    n = T.shape[0]
    bad = T[inv[:, None], T] != np.arange(n)[None, :]
    hit = _first(bad)
    return hit if hit is not None else np.full(2, -1, np.int64)


def inner_identity_violation(T, LD):
    n = T.shape[0]
    z = np.arange(n)
    for x in range(n):
        xy = T[x]
        lhs = LD[xy[:, None], T[x][T]]
        # (z, y, x) for every (y, z): rows y, columns z
        zy = T.T
        assoc = LD[T[z[None, :], T[:, x][:, None]], T[zy, x]]
        rhs = T[z[None, :], assoc]
        hit = _first(lhs != rhs, (x,))
        if hit is not None:
            return hit
    return _NONE3.copy()


def assoc_power_violation(T, LD, P, exps, K, kmin, triples):
    X, Y, Z = triples[:, 0], triples[:, 1], triples[:, 2]
    base = _assoc(T, LD, X, Y, Z)
    m = len(exps)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                k = exps[i] * exps[j] * exps[l] - kmin
                bad = _assoc(T, LD, P[i][X], P[j][Y], P[l][Z]) != K[k][base]
                hit = np.flatnonzero(bad)
                if len(hit):
                    t = triples[hit[0]]
                    return np.array([*t, exps[i], exps[j], exps[l]], np.int64)
    return np.full(6, -1, np.int64)


def assoc_cube_violation(T, LD, e):
    n = T.shape[0]
    for x in range(n):
        a = LD[T[x][T], T[T[x]]]
        hit = _first(T[T[a, a], a] != e, (x,))
        if hit is not None:
            return hit
    return _NONE3.copy()


def _expansion_bad(T, LD, x, y, u, v):
    lhs = _assoc(T, LD, T[x, y], u, v)
    a = _assoc(T, LD, x, u, v)
    b = _assoc(T, LD, a, x, y)
    c = _assoc(T, LD, y, u, v)
    d = _assoc(T, LD, c, y, x)
    return lhs != T[T[T[a, b], c], d]


def expansion_violation_all(T, LD):
    n = T.shape[0]
    idx = np.arange(n)
    Y, U, V = np.meshgrid(idx, idx, idx, indexing="ij")
    for x in range(n):
        hit = _first(_expansion_bad(T, LD, x, Y, U, V), (x,))
        if hit is not None:
            return hit
    return np.full(4, -1, np.int64)


def expansion_violation_sample(T, LD, quads):
    bad = _expansion_bad(T, LD, quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3])
    hit = np.flatnonzero(bad)
    if len(hit) == 0:
        return np.full(4, -1, np.int64)
    return quads[hit[0]].astype(np.int64)


def normality_witness(T, LD, mask):
    hs = np.flatnonzero(mask)
    for x in range(T.shape[0]):
        images = LD[T[x][:, None], T[x][T[:, hs]]]
        bad = ~mask[images]
        hit = _first(bad)
        if hit is not None:
            return np.array([x, hit[0], hs[hit[1]]], np.int64)
    return _NONE3.copy()


def close_subloop(T, inv, mask):
    out = mask.copy()
    while True:
        m = np.flatnonzero(out)
        new = out.copy()
        new[inv[m]] = True
        new[T[np.ix_(m, m)].ravel()] = True
        if np.array_equal(new, out):
            return out
        out = new


_FNV_PRIME = np.uint64(1099511628211)


def row_hashes(P):
    h = np.full(P.shape[0], 14695981039346656037, np.uint64)
    with np.errstate(over="ignore"):
        for j in range(P.shape[1]):
            h = (h ^ P[:, j].astype(np.uint64)) * _FNV_PRIME
    return h


def perm_orders(P):
    m, n = P.shape
    rows = np.arange(m)[:, None]
    cur = P.copy()
    cycle = np.zeros((m, n), np.int64)
    start = np.arange(n)[None, :]
    step = 1
    while True:
        back = (cur == start) & (cycle == 0)
        cycle[back] = step
        if (cycle > 0).all():
            break
        cur = P[rows, cur]
        step += 1
    return np.lcm.reduce(cycle, axis=1)
