from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from moufang.catalog import CML81_GENERATORS, abelian, builtin, cyclic
from moufang.errors import CapExceeded, NotDescending
from moufang.structure import center
from moufang.subloops import (
    all_subloops,
    chain_stabilizes,
    cogenerator_subloop,
    generate,
    is_cogenerating,
    is_normal,
    is_subloop,
    layer,
    minimal_normal_subloops,
    normal_closure,
    normal_subloops,
    trivial,
    whole,
)

import oracles as O


def test_generate_small():
    Z9 = cyclic(9)
    assert generate(Z9, [3]).members == [0, 3, 6]
    assert generate(Z9, []).members == [0]


def test_generate_cml81_canonical(C81):
    assert generate(C81, CML81_GENERATORS).order == 81
    # two elements generate an associative subloop
    H = generate(C81, CML81_GENERATORS[:2])
    assert H.order == 9
    from moufang.loop import associator
    assert all(associator(C81, a, b, c) == 0 for a in H for b in H for c in H)


@given(st.lists(st.integers(0, 80), max_size=3))
def test_generate_matches_closure_oracle(gens):
    Q = builtin("cml81")
    assert set(generate(Q, gens).members) == O.closure(Q.table, gens)


def test_subgroups_of_abelian_groups_are_normal():
    A = abelian([3, 9])
    for H in all_subloops(A):
        assert is_normal(A, H)[0]


def test_center_is_normal(C81):
    assert is_normal(C81, center(C81))[0]


def test_non_normal_witness(C81):
    H = generate(C81, [27])
    ok, wit = is_normal(C81, H)
    assert not ok
    assert not O.inner_images(C81.table, set(H.members)) <= set(H.members)
    x, y, z = wit
    T = C81.table
    image = int(np.flatnonzero(T[T[x, y]] == T[x, T[y, z]])[0])
    assert z in H and image not in H


def test_normal_closure(C81):
    A = abelian([3, 9])
    for a in range(27):
        assert normal_closure(A, [a]) == generate(A, [a])
    assert normal_closure(C81, range(81)).order == 81
    for a in range(81):
        N = normal_closure(C81, [a])
        G = generate(C81, [a])
        assert G <= N
        assert (N == G) == is_normal(C81, G)[0]
        if a % 8 == 0:
            assert set(N.members) == O.normal_closure(C81.table, [a])


def test_enumeration_small():
    assert [H.members for H in all_subloops(cyclic(9))] == [[0], [0, 3, 6], list(range(9))]
    Z3Z3 = abelian([3, 3])
    subs = all_subloops(Z3Z3)
    assert Counter(H.order for H in subs) == {1: 1, 3: 4, 9: 1}
    assert {frozenset(H.members) for H in subs} == set(O.all_subsets_subloops(Z3Z3.table))


def test_enumeration_cml81(C81):
    subs = all_subloops(C81)
    census = Counter(H.order for H in subs)
    assert census == {1: 1, 3: 40, 9: 130, 27: 13, 81: 1}
    # orders 3 and 9 come from 1- and 2-generated subloops; the oracle agrees
    pairs = {O.closure(C81.table, [a, b]) for a in range(81) for b in range(a, 81)}
    assert Counter(len(s) for s in pairs) == {1: 1, 3: 40, 9: 130}
    assert subs == sorted(subs, key=lambda H: (H.order, H.encoding()))
    assert all(is_subloop(C81, H.mask) for H in subs)


def test_enumeration_cap(C81):
    with pytest.raises(CapExceeded):
        all_subloops(C81, cap=20)


def test_index_three_subloops_are_normal(C81):
    for H in all_subloops(C81):
        if H.order == 27:
            assert is_normal(C81, H)[0]


def test_minimal_normal_subloops(C81):
    mins = minimal_normal_subloops(C81)
    Z = center(C81)
    assert all(N.order == 3 and N <= Z for N in mins)
    assert [N.members for N in mins] == [[0, 1, 2]]
    normals = normal_subloops(C81)
    nontrivial = [H for H in normals if H.order > 1]
    expected = [H for H in nontrivial if not any(K < H for K in nontrivial)]
    assert mins == expected


def test_layers():
    assert layer(cyclic(9), 3).subloop.members == [0, 3, 6]
    assert layer(builtin("cml81"), 3).subloop.order == 81
    Z2Z9 = builtin("cyclic:2*cyclic:9")
    L = layer(Z2Z9, 3)
    assert L.subloop.members == [0, 3, 6] and not L.closure_added


def test_cogenerators():
    Z9 = cyclic(9)
    B = cogenerator_subloop(Z9)
    assert B.members == [0, 3, 6] and is_cogenerating(Z9, B)[0]
    Z2Z9 = builtin("cyclic:2*cyclic:9")
    B = cogenerator_subloop(Z2Z9)
    # Z2 x {0, 3, 6} with index i * 9 + j
    assert B.members == [0, 3, 6, 9, 12, 15]
    assert is_cogenerating(Z2Z9, B)[0]
    C81 = builtin("cml81")
    assert cogenerator_subloop(C81).order == 81
    ok, wit = is_cogenerating(Z9, trivial(Z9))
    assert not ok and wit.order > 1


def test_cogeneration_random_path(Z9xC81):
    B = cogenerator_subloop(Z9xC81)
    assert B.order == 243
    assert is_cogenerating(Z9xC81, B, trials=50, seed=0xC3)[0]


def test_chains():
    Z9 = cyclic(9)
    assert chain_stabilizes(Z9, [[1], [3], []]) == 2
    assert chain_stabilizes(Z9, [[1], [1], [1]]) == 0
    with pytest.raises(NotDescending) as err:
        chain_stabilizes(Z9, [[3], [1]])
    assert err.value.position == 1


def test_random_chains_cml81(C81, rng):
    for _ in range(30):
        H = whole(C81)
        chain = [H.members]
        drops = 0
        while H.order > 1:
            gens = list(rng.choice(H.members, size=int(rng.integers(1, 3))))
            K = generate(C81, gens)
            if K < H:
                H = K
            elif rng.random() < 0.3:
                H = trivial(C81)
            else:
                continue
            drops += 1
            chain.append(H.members)
        chain += [chain[-1]] * 2
        idx = chain_stabilizes(C81, chain)
        assert idx <= drops
        # oracle: first position equal to the tail, by direct comparison
        sets = [O.closure(C81.table, g) for g in chain]
        assert idx == min(i for i in range(len(sets)) if all(s == sets[-1] for s in sets[i:]))
        assert all(len(sets[i + 1]) < len(sets[i]) for i in range(idx))
