import random
from itertools import product

import pytest

from cyclicsep.arith import PiSet
from cyclicsep.base_groups import AbelianGroup, FreeGroup, subgroup
from cyclicsep.commuting_product import normalize
from cyclicsep.dsl import parse_word
from cyclicsep.finite_groups import abelian, cyclic, dihedral, generated
from cyclicsep.quotients import (BaseHom, HomBudgetError, IncompatibleHoms, commuting_compatible,
                                 enumerate_G_quotients, enumerate_base_homs, induced_hom, target_groups)

from helpers import G22_TEXT, MIXED_TEXT, load, random_word

TWO = PiSet.single(2)


def _r_s(D4):
    r = next(x for x in range(8) if D4.element_order(x) == 4)
    s = next(x for x in range(8) if D4.element_order(x) == 2 and not D4.commute(x, r))
    return r, s


def test_base_hom_counts():
    C2 = cyclic(2)
    assert len(enumerate_base_homs(AbelianGroup(1, names=["z"]), C2)) == 2
    assert len(enumerate_base_homs(FreeGroup(["x", "y"]), C2)) == 4
    homs = enumerate_base_homs(AbelianGroup(0, [4], names=["t"]), C2)
    assert [h.images for h in homs] == [(0,), (1,)]
    # Z/2 x Z/2 into C4: images must have order dividing 2 and commute
    assert len(enumerate_base_homs(AbelianGroup(0, [2, 2], names=["u", "v"]), cyclic(4))) == 4
    with pytest.raises(HomBudgetError):
        enumerate_base_homs(FreeGroup(["x", "y"]), cyclic(8), limit=10)


def test_commuting_compatible_examples(g22):
    doc, spec = g22
    V = abelian([2, 2])
    for ia, ib in product(range(4), repeat=2):
        assert commuting_compatible(BaseHom(spec.A, V, (ia,)), BaseHom(spec.B, V, (ib,)), spec.H, spec.K)
    D4 = dihedral(4)
    r, s = _r_s(D4)
    fa, fb = BaseHom(spec.A, D4, (r,)), BaseHom(spec.B, D4, (s,))
    assert commuting_compatible(fa, fb, spec.H, spec.K)
    A, B = spec.A, spec.B
    assert not commuting_compatible(fa, fb, subgroup(A, [(1,)]), subgroup(B, [(1,)]))


def test_induced_hom_examples(g22):
    doc, spec = g22
    V = abelian([2, 2])
    triv = induced_hom(spec, BaseHom(spec.A, V, (0,)), BaseHom(spec.B, V, (0,)))
    assert triv.apply(parse_word(doc, "a b^3 a^-2")) == 0
    # elements of abelian([2, 2]) are indexed in product order: (1,0) -> 2, (0,1) -> 1
    psi = induced_hom(spec, BaseHom(spec.A, V, (2,)), BaseHom(spec.B, V, (1,)))
    assert psi.apply(parse_word(doc, "a b")) == 3
    C2, C4 = cyclic(2), cyclic(4)
    with pytest.raises(IncompatibleHoms):
        induced_hom(spec, BaseHom(spec.A, C2, (1,)), BaseHom(spec.B, C4, (1,)))
    doc2, spec2 = load(G22_TEXT.replace("a^2", "a").replace("b^2", "b"))
    D4 = dihedral(4)
    r, s = _r_s(D4)
    with pytest.raises(IncompatibleHoms):
        induced_hom(spec2, BaseHom(spec2.A, D4, (r,)), BaseHom(spec2.B, D4, (s,)))


def test_stream_examples(g22):
    doc, spec = g22
    assert list(enumerate_G_quotients(spec, TWO, 1)) == []
    two = list(enumerate_G_quotients(spec, TWO, 2))
    assert len(two) == 4 and all(h.target.order == 2 for h in two)
    four = list(enumerate_G_quotients(spec, TWO, 4))
    ab = parse_word(doc, "a b")
    # the hom onto C2 x C2 sending a, b to distinct involutions, so ab is the third one
    klein = [h for h in four if h.target.order == 4
             and max(h.target.element_order(x) for x in range(4)) == 2
             and len({0, h.phi_A.images[0], h.phi_B.images[0]}) == 3]
    assert klein
    for h in klein:
        assert h.apply(ab) not in (0, h.phi_A.images[0], h.phi_B.images[0])


def test_stream_order(g22):
    doc, spec = g22
    targets = target_groups(TWO, 8)
    pos = {id(P): i for i, P in enumerate(targets)}
    keys = [(h.target.order, pos[id(h.target)], h.phi_A.images, h.phi_B.images)
            for h in enumerate_G_quotients(spec, TWO, 8)]
    assert keys == sorted(keys)


def _independent_tables():
    c4 = [[(i + j) % 4 for j in range(4)] for i in range(4)]
    v4 = [[i ^ j for j in range(4)] for i in range(4)]
    c2 = [[(i + j) % 2 for j in range(2)] for i in range(2)]
    return {2: [c2], 4: [c4, v4]}


def _brute_count(T, m=2, n=2):
    N = len(T)
    count = 0
    for x, y in product(range(N), repeat=2):
        u, v = 0, 0
        for _ in range(m):
            u = T[u][x]
        for _ in range(n):
            v = T[v][y]
        if T[u][v] == T[v][u]:
            count += 1
    return count


def test_completeness_small_orders(g22):
    doc, spec = g22
    homs = list(enumerate_G_quotients(spec, TWO, 4))
    by_order = {}
    for h in homs:
        by_order[h.target.order] = by_order.get(h.target.order, 0) + 1
    ref = {n: sum(_brute_count(T) for T in ts) for n, ts in _independent_tables().items()}
    assert by_order == ref
    # distinct image tuples, no duplicates
    keys = [(id(h.target), h.phi_A.images, h.phi_B.images) for h in homs]
    assert len(keys) == len(set(keys))


def test_d4_count_against_relation_check(g22):
    doc, spec = g22
    D4 = dihedral(4)
    got = list(enumerate_G_quotients(spec, TWO, 8, targets=[D4]))
    assert len(got) == _brute_count(D4.table)
    doc3, spec3 = load(G22_TEXT.replace("a^2", "a").replace("b^2", "b"))
    got = list(enumerate_G_quotients(spec3, TWO, 8, targets=[D4]))
    assert len(got) == _brute_count(D4.table, 1, 1)


@pytest.mark.parametrize("text", [G22_TEXT, MIXED_TEXT])
def test_apply_normal_form_consistency(text):
    doc, spec = load(text)
    homs = list(enumerate_G_quotients(spec, TWO, 8))
    rng = random.Random(31)
    sample = rng.sample(homs, min(6, len(homs)))
    for psi in sample:
        for _ in range(1000):
            w = random_word(rng, spec, 6)
            assert psi.apply(w) == psi.apply(normalize(spec, w))


def test_image_is_a_pi_group(g22):
    doc, spec = g22
    for psi in enumerate_G_quotients(spec, TWO, 8):
        img = generated(psi.target, [psi.phi_A.images[0], psi.phi_B.images[0]])
        assert TWO.is_pi_number(len(img))


def test_budget_reports_frontier(g22):
    doc, spec = g22
    with pytest.raises(HomBudgetError) as err:
        list(enumerate_G_quotients(spec, TWO, 8, budget=40))
    assert err.value.frontier == 4


def test_target_groups_all_primes():
    ts = target_groups(PiSet.all_primes(), 9)
    assert sorted({P.order for P in ts}) == [2, 3, 4, 5, 7, 8, 9]
    orders = [P.order for P in ts]
    assert orders == sorted(orders)
    assert [P.order for P in target_groups(PiSet.single(3), 30)] == [3, 9, 9, 27, 27, 27, 27, 27]
    assert target_groups(TWO, 1) == []
