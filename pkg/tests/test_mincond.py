import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from moufang.catalog import builtin, cml81, cyclic
from moufang.errors import CapExceeded, NoComplementFound, NotDescending, PreconditionViolated
from moufang.loop import associator, format_table, is_cml, order_of
from moufang.mincond import (
    INFINITE,
    PRIME,
    Factor,
    QUASICYCLIC,
    Grid,
    StructuredCML,
    cogenerator_subloop,
    decompose,
    divisible_complement,
    divisible_part,
    element_from_json,
    element_to_json,
    factor_orders,
    format_fraction,
    height3,
    intersection,
    is_cogenerating,
    is_normal,
    load_structured,
    make_subloop,
    parse_fraction,
    predicted_truncation_structure,
    quasicyclic_factor_series,
    random_descending_chain,
    reduced_split,
    s_associator,
    s_chain_stabilizes,
    s_generate,
    s_inv,
    s_mul,
    s_normal_closure,
    s_order,
    s_pow,
    socle,
    subloop_from_json,
    subloop_to_json,
    trivial,
    truncate,
    verify_direct,
    whole,
)
from moufang.mincond.elements import close_indices
from moufang.structure import center, upper_central_series
from moufang.subloops import generate


@pytest.fixture(scope="module")
def P3():
    return StructuredCML([3], cyclic(1))


@pytest.fixture(scope="module")
def Q81():
    return StructuredCML([3], cml81())


@pytest.fixture(scope="module")
def Q35():
    return StructuredCML([3, 5], cyclic(9))


def fractions(p, depth=4):
    return st.builds(lambda k, a: Fraction(a % p ** k, p ** k),
                     st.integers(0, depth), st.integers(0, 10 ** 6))


def elements81():
    return st.builds(lambda f, c: (f, c), fractions(3), st.integers(0, 80))


# arithmetic -----------------------------------------------------------------

def test_fraction_text():
    assert parse_fraction("2/3^2") == Fraction(2, 9)
    assert parse_fraction("4/27") == Fraction(4, 27)
    assert parse_fraction("0") == 0
    assert format_fraction(Fraction(2, 9)) == "2/9"
    with pytest.raises(ValueError):
        parse_fraction("1/x")


def test_element_validation(Q35):
    a = Q35.element(["4/3", "1/25"], 2)
    assert a.div == (Fraction(1, 3), Fraction(1, 25))
    with pytest.raises(ValueError):
        Q35.element(["1/5", "0"], 0)  # not a 3-power fraction
    with pytest.raises(IndexError):
        Q35.element([], 9)


def test_products(P3):
    a = P3.element(["1/3"])
    assert s_mul(P3, a, a) == P3.element(["2/3"])
    assert s_pow(P3, P3.element(["1/9"]), 9) == P3.identity
    assert s_order(P3, P3.element(["1/27"])) == 27
    assert s_inv(P3, a) == P3.element(["2/3"])


@given(elements81(), elements81(), elements81())
def test_associator_lives_in_finite_part(a, b, c):
    Q = StructuredCML([3], cml81(), verify=False)
    x, y, z = (Q.element([f], fin) for f, fin in (a, b, c))
    assoc = s_associator(Q, x, y, z)
    assert assoc == Q.element([0], associator(Q.C, a[1], b[1], c[1]))


@given(elements81(), elements81())
def test_product_commutes(a, b):
    Q = StructuredCML([3], cml81(), verify=False)
    x, y = Q.element([a[0]], a[1]), Q.element([b[0]], b[1])
    assert s_mul(Q, x, y) == s_mul(Q, y, x)


def test_json_elements(Q35):
    a = Q35.element(["1/9", "3/25"], 4)
    assert element_to_json(a) == {"div": ["1/9", "3/25"], "fin": 4}
    assert element_from_json(Q35, element_to_json(a)) == a


# closure ----------------------------------------------------------------------

def _naive_closure(grid, seeds):
    m = {int(x) for x in seeds} | {grid.Q.C.e}
    while True:
        a = np.array(sorted(m))
        p = set(grid.mul(a[:, None], a[None, :]).ravel().tolist()) | set(grid.inv(a).tolist())
        if p <= m:
            return np.array(sorted(m))
        m |= p


@pytest.mark.parametrize("summands,C", [([3], "cml81"), ([3, 5], "cyclic:9"), ([3, 3], "cyclic:3")])
def test_closure_matches_all_pairs(summands, C):
    Q = StructuredCML(summands, builtin(C))
    grid = Grid(Q, [2] * Q.r)
    rng = np.random.default_rng(1)
    for _ in range(25):
        seeds = rng.integers(0, grid.size, size=rng.integers(0, 3))
        assert np.array_equal(close_indices(grid, seeds), _naive_closure(grid, seeds))


def test_closure_cap(Q81):
    grid = Grid(Q81, [2])
    with pytest.raises(CapExceeded):
        close_indices(grid, grid.all_indices(), cap=100)


def test_generation(P3, Q81):
    assert s_generate(P3, [P3.element(["1/3"])]).order == 3
    a = Q81.element(["1/9"], 27)  # non-central finite part
    H = s_generate(Q81, [a])
    # finite part generates {e, a, a^2}; 1/9 generates Z9 -> cyclic of order 9
    assert H.order == 9 == s_order(Q81, a)
    b = Q81.element(["0"], 9)
    H2 = s_generate(Q81, [a, b])
    T = truncate(Q81, 2)
    oracle = generate(T.loop, [T.index(a), T.index(b)])
    assert H2.order == oracle.order
    assert set(H2.residual) == {T.elements[i] for i in oracle.members}


def test_quasicyclic_subgroup_chain():
    for p in (2, 3, 5):
        Q = StructuredCML([p], cyclic(1))
        chain = [s_generate(Q, [Q.element([Fraction(1, p ** k)])]) for k in range(6)]
        assert chain[1] == socle(Q, p)
        for k in range(5):
            assert chain[k] < chain[k + 1] and chain[k + 1].order == p ** (k + 1)
        # every subgroup of Z(p^5) is one of these: each cyclic one is
        nums = range(p ** 5) if p < 5 else np.random.default_rng(p).integers(0, p ** 5, 60)
        for num in nums:
            a = Q.element([Fraction(int(num), p ** 5)])
            k = Q.level(a)[0]
            assert s_generate(Q, [a]) == chain[k]
        assert make_subloop(Q, [0]) == whole(Q)


def test_intersection(Q35):
    H = make_subloop(Q35, [0], [Q35.element(["0", "1/5"], 3)])
    K = make_subloop(Q35, [1], [Q35.element(["1/9", "0"], 0)])
    M = intersection(H, K)
    assert M.full == frozenset()
    assert M.residual_order == 9 * 5
    for a in M.residual:
        assert a in H and a in K


# heights, socles, cogenerators ------------------------------------------------

def test_height3(P3, Q81):
    for k in range(1, 5):
        assert height3(P3, P3.element([Fraction(1, 3 ** k)])) == INFINITE
    assert height3(Q81, Q81.identity) == INFINITE
    assert height3(Q81, Q81.element(["1/3"], 27)) == 0
    Q = StructuredCML([5], cyclic(9))
    assert height3(Q, Q.element([], 3)) == 1
    assert height3(Q, Q.element([], 1)) == 0


def test_socles(P3, Q81, Q35):
    assert sorted(socle(P3, 3).residual) == [P3.element([f]) for f in ("0", "1/3", "2/3")]
    assert socle(Q81, 3).order == 243
    assert socle(Q81, 5).order == 1
    assert socle(Q35, 3).order == 9 and socle(Q35, 5).order == 5


def test_cogenerators(P3):
    B = cogenerator_subloop(P3)
    assert B == socle(P3, 3)
    for num in range(1, 243):
        H = s_generate(P3, [P3.element([Fraction(num, 243)])])
        assert B <= H
    Q = StructuredCML([3, 5], cyclic(1))
    assert cogenerator_subloop(Q).order == 15


def test_cogenerating_structured(Q81):
    B = cogenerator_subloop(Q81)
    ok, wit = is_cogenerating(Q81, B, trials=200, seed=0xC3)
    assert ok and B.is_finite
    ok, wit = is_cogenerating(Q81, trivial(Q81), trials=5, seed=0xC3)
    assert not ok


def test_normal_closure_structured(Q81):
    a = Q81.element(["1/3"], 27)
    N = s_normal_closure(Q81, [a])
    assert is_normal(Q81, N)[0]
    assert not is_normal(Q81, s_generate(Q81, [a]))[0]
    # finite shadow: the normal closure of (0, 27) in cml81 has order 9
    assert s_normal_closure(Q81, [Q81.element([], 27)]).order == 9


def test_divisible_part_and_split(Q81):
    assert divisible_part(whole(Q81)).full == {0}
    assert divisible_part(s_generate(Q81, [Q81.element(["1/9"], 3)])).order == 1
    H = make_subloop(Q81, [0], [Q81.element(["1/9"], 3)])
    assert divisible_part(H) == make_subloop(Q81, [0])
    D, C = reduced_split(Q81)
    assert D.full == {0} and C.residual_order == 81
    assert intersection(D, C) == trivial(Q81)
    assert center(Q81.C).order == 3  # C is reduced: finite


# complements --------------------------------------------------------------------

def test_complement_trivial_b(Q81):
    K = divisible_complement(Q81, trivial(Q81))
    assert K == reduced_split(Q81)[1]
    for k in (0, 1, 2):
        assert verify_direct(Q81, K, k) == (True, None)


def test_complement_z3():
    Q = StructuredCML([3], cyclic(3))
    B = s_generate(Q, [Q.element(["1/3"], 1)])
    K = divisible_complement(Q, B)
    assert K == B
    for k in (0, 1, 2):
        assert verify_direct(Q, K, k)[0]
    q = Q.element(["2/9"], 2)
    d, kappa = decompose(Q, K, q)
    assert d.fin == Q.C.e and kappa in K and s_mul(Q, d, kappa) == q


def test_complement_noncentral_generator(Q81):
    B = s_generate(Q81, [Q81.element(["1/3"], 27)])
    K = divisible_complement(Q81, B)
    assert B <= K and K.order == 81
    for k in (0, 1, 2):
        assert verify_direct(Q81, K, k)[0]


def _max_complement_order(Q, fin):
    """Largest subloop of the k=1 truncation containing (1/3, fin) and
    meeting {(j/3, e)} trivially, by search over one-element extensions."""
    T = truncate(Q, 1)
    L = T.loop
    D = np.array([a.fin == Q.C.e for a in T.elements])
    b = T.index(Q.element(["1/3"], fin))
    start = generate(L, [b])
    seen = {start.key}
    frontier, best = [start], start.order
    while frontier:
        nxt = []
        for H in frontier:
            for g in np.flatnonzero(~H.mask):
                K = generate(L, H.members + [int(g)])
                if (K.mask & D).sum() > 1 or K.key in seen:
                    continue
                seen.add(K.key)
                nxt.append(K)
                best = max(best, K.order)
        frontier = nxt
    return best


def test_complement_central_generator_does_not_exist(Q81):
    # Any complement of D in Z(3^inf) x cml81 has order 81 and contains every
    # (0, z) with z an associator; cml81's associators fill its center, so a
    # complement cannot also hold (1/3, a) for central a != e.
    B = s_generate(Q81, [Q81.element(["1/3"], 1)])
    with pytest.raises(NoComplementFound):
        divisible_complement(Q81, B)
    assert _max_complement_order(Q81, 1) == 27
    assert _max_complement_order(Q81, 27) == 81


def test_complement_preconditions(Q81):
    with pytest.raises(PreconditionViolated):
        divisible_complement(Q81, s_generate(Q81, [Q81.element(["1/3"], 0)]))
    with pytest.raises(PreconditionViolated):
        divisible_complement(Q81, whole(Q81))


# series and truncations ----------------------------------------------------------

def test_factor_series(P3, Q81):
    s = quasicyclic_factor_series(P3)
    assert [str(t.factor) for t in s[1:]] == ["QUASICYCLIC(3)"]
    Z9 = StructuredCML([], cyclic(9))
    s = quasicyclic_factor_series(Z9)
    assert [t.factor for t in s[1:]] == [Factor(PRIME, 3)] * 2
    assert [t.subloop.order for t in s] == [1, 3, 9]
    s = quasicyclic_factor_series(Q81)
    kinds = [t.factor.kind for t in s[1:]]
    assert kinds == [QUASICYCLIC] + [PRIME] * 4
    assert factor_orders(s) == [None, 3, 3, 3, 3]


@pytest.mark.parametrize("k", [0, 1, 2])
def test_factor_orders_partition_truncations(Q35, k):
    s = quasicyclic_factor_series(Q35)
    prod = 1
    for t in s[1:]:
        prod *= t.factor.p ** k if t.factor.kind == QUASICYCLIC else t.factor.p
    assert prod == truncate(Q35, k).loop.n


def test_truncations(P3, Q81):
    Z9 = truncate(P3, 2).loop
    assert Z9.n == 9 and Z9.exponent == 9
    assert np.array_equal(truncate(Q81, 0).loop.table, Q81.C.table)
    T = truncate(Q81, 1)
    assert T.loop.n == 243 and is_cml(T.loop)[0]
    assert is_cml(truncate(StructuredCML([3, 5], cyclic(3)), 1).loop)[0]
    with pytest.raises(CapExceeded):
        truncate(Q81, 5)


def test_truncation_matches_prediction(Q81, Q35):
    for Q, k in ((Q81, 1), (Q35, 1), (Q35, 0)):
        T = truncate(Q, k).loop
        series = upper_central_series(T)
        pred = predicted_truncation_structure(Q, k)
        assert pred["order"] == T.n
        assert pred["series_orders"] == series.orders
        assert pred["class"] == series.nilpotency_class


# chains -------------------------------------------------------------------------

def test_chains(Q35):
    rng = np.random.default_rng(0xC3)
    for _ in range(20):
        chain = random_descending_chain(Q35, rng)
        idx = s_chain_stabilizes(chain)
        assert chain[idx] == chain[-1]
        assert all(chain[i + 1] < chain[i] for i in range(idx))
    with pytest.raises(NotDescending):
        s_chain_stabilizes([trivial(Q35), whole(Q35)])
    assert s_chain_stabilizes([whole(Q35)] * 3) == 0


# descriptors ---------------------------------------------------------------------

def test_descriptor_files(tmp_path):
    (tmp_path / "c.tbl").write_text(format_table(cyclic(9)))
    desc = {"summands": [3, 3, 5], "finite_part": {"file": "c.tbl"}}
    path = tmp_path / "q.json"
    path.write_text(json.dumps(desc))
    Q = load_structured(path)
    assert Q.summands == (3, 3, 5) and Q.C.n == 9
    obj = {"full": [0], "residual_gens": [{"div": ["1/9", "0", "0"], "fin": 7}]}
    H = subloop_from_json(Q, obj)
    assert H.full == {0} and H.order == INFINITE
    out = subloop_to_json(H)
    assert subloop_from_json(Q, out) == H
    assert out["residual_order"] == 9
    assert load_structured({"summands": [3], "finite_part": {"builtin": "cml81"}}).C.n == 81
