"""Compiled scan kernels.

Every function mirrors one in ``_numpy`` with the same signature and return
value; ``moufang.kernels`` picks one set at import time.  Triples and
quadruples are returned as int64 arrays filled with -1 when no violation
exists.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _assoc(T, LD, a, b, c):
    # (a,b,c) solves (a.bc) x = ab.c
    return LD[T[a, T[b, c]], T[T[a, b], c]]


@njit(cache=True)
def cml_violation(T):
    n = T.shape[0]
    out = np.full(3, -1, np.int64)
    for x in range(n):
        x2 = T[x, x]
        for y in range(n):
            xy = T[x, y]
            for z in range(n):
                if T[x2, T[y, z]] != T[xy, T[x, z]]:
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    return out
    return out


@njit(cache=True)
def nonassoc_triple(T):
    n = T.shape[0]
    out = np.full(3, -1, np.int64)
    for a in range(n):
        for b in range(n):
            ab = T[a, b]
            for c in range(n):
                if T[ab, c] != T[a, T[b, c]]:
                    out[0] = a
                    out[1] = b
                    out[2] = c
                    return out
    return out


@njit(cache=True)
def central_mask(T, cand):
    n = T.shape[0]
    out = np.zeros(n, np.bool_)
    for i in range(cand.shape[0]):
        x = cand[i]
        ok = True
        for y in range(n):
            xy = T[x, y]
            for z in range(n):
                if T[xy, z] != T[x, T[y, z]]:
                    ok = False
                    break
            if not ok:
                break
        out[x] = ok
    return out


@njit(cache=True)
def associator_mask(T, LD):
    n = T.shape[0]
    out = np.zeros(n, np.bool_)
    for a in range(n):
        for b in range(n):
            ab = T[a, b]
            for c in range(n):
                out[LD[T[a, T[b, c]], T[ab, c]]] = True
    return out


@njit(cache=True)
def ip_violation(T, inv):
    n = T.shape[0]
    out = np.full(2, -1, np.int64)
    for x in range(n):
        for y in range(n):
            if T[inv[x], T[x, y]] != y:
                out[0] = x
                out[1] = y
                return out
    return out


@njit(cache=True)
def inner_identity_violation(T, LD):
    # L(x,y)z = z (z,y,x)
    n = T.shape[0]
    out = np.full(3, -1, np.int64)
    for x in range(n):
        for y in range(n):
            xy = T[x, y]
            for z in range(n):
                lhs = LD[xy, T[x, T[y, z]]]
                rhs = T[z, _assoc(T, LD, z, y, x)]
                if lhs != rhs:
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    return out
    return out


@njit(cache=True)
def assoc_power_violation(T, LD, P, exps, K, kmin, triples):
    """P[i] is the map x -> x^exps[i]; K[k - kmin] is the map x -> x^k."""
    m = exps.shape[0]
    out = np.full(6, -1, np.int64)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                k = exps[i] * exps[j] * exps[l] - kmin
                for t in range(triples.shape[0]):
                    x, y, z = triples[t, 0], triples[t, 1], triples[t, 2]
                    lhs = _assoc(T, LD, P[i, x], P[j, y], P[l, z])
                    if lhs != K[k, _assoc(T, LD, x, y, z)]:
                        out[0] = x
                        out[1] = y
                        out[2] = z
                        out[3] = exps[i]
                        out[4] = exps[j]
                        out[5] = exps[l]
                        return out
    return out


@njit(cache=True)
def assoc_cube_violation(T, LD, e):
    n = T.shape[0]
    out = np.full(3, -1, np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                a = _assoc(T, LD, x, y, z)
                if T[T[a, a], a] != e:
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    return out
    return out


@njit(cache=True)
def _expansion_ok(T, LD, x, y, u, v):
    # (xy,u,v) = (x,u,v)((x,u,v),x,y)(y,u,v)((y,u,v),y,x), left-normed
    lhs = _assoc(T, LD, T[x, y], u, v)
    a = _assoc(T, LD, x, u, v)
    b = _assoc(T, LD, a, x, y)
    c = _assoc(T, LD, y, u, v)
    d = _assoc(T, LD, c, y, x)
    return lhs == T[T[T[a, b], c], d]


@njit(cache=True)
def expansion_violation_all(T, LD):
    n = T.shape[0]
    out = np.full(4, -1, np.int64)
    for x in range(n):
        for y in range(n):
            for u in range(n):
                for v in range(n):
                    if not _expansion_ok(T, LD, x, y, u, v):
                        out[0] = x
                        out[1] = y
                        out[2] = u
                        out[3] = v
                        return out
    return out


@njit(cache=True)
def expansion_violation_sample(T, LD, quads):
    out = np.full(4, -1, np.int64)
    for i in range(quads.shape[0]):
        x, y, u, v = quads[i, 0], quads[i, 1], quads[i, 2], quads[i, 3]
        if not _expansion_ok(T, LD, x, y, u, v):
            out[0] = x
            out[1] = y
            out[2] = u
            out[3] = v
            return out
    return out


@njit(cache=True)
def normality_witness(T, LD, mask):
    # first (x, y, h) with L(x,y)h outside the subloop
    n = T.shape[0]
    out = np.full(3, -1, np.int64)
    for x in range(n):
        for y in range(n):
            xy = T[x, y]
            for h in range(n):
                if mask[h] and not mask[LD[xy, T[x, T[y, h]]]]:
                    out[0] = x
                    out[1] = y
                    out[2] = h
                    return out
    return out


@njit(cache=True)
def close_subloop(T, inv, mask):
    n = T.shape[0]
    out = mask.copy()
    members = np.empty(n, np.int64)
    count = 0
    for i in range(n):
        if out[i]:
            members[count] = i
            count += 1
    # every member is multiplied once against everything present when it is
    # processed; later arrivals then multiply against it in their own turn
    head = 0
    while head < count:
        a = members[head]
        head += 1
        b = inv[a]
        if not out[b]:
            out[b] = True
            members[count] = b
            count += 1
        for j in range(head):
            c = members[j]
            for p in (T[a, c], T[c, a]):
                if not out[p]:
                    out[p] = True
                    members[count] = p
                    count += 1
    return out


@njit(cache=True)
def row_hashes(P):
    m, n = P.shape
    out = np.empty(m, np.uint64)
    for i in range(m):
        h = np.uint64(14695981039346656037)
        for j in range(n):
            h = (h ^ np.uint64(P[i, j])) * np.uint64(1099511628211)
        out[i] = h
    return out


@njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def perm_orders(P):
    m, n = P.shape
    out = np.empty(m, np.int64)
    seen = np.zeros(n, np.bool_)
    for i in range(m):
        seen[:] = False
        order = 1
        for s in range(n):
            if seen[s]:
                continue
            length = 0
            j = s
            while not seen[j]:
                seen[j] = True
                j = P[i, j]
                length += 1
            order = order // _gcd(order, length) * length
        out[i] = order
    return out
