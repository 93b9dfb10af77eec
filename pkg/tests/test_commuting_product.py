import random

import pytest

from cyclicsep.base_groups import AbelianGroup, FreeGroup
from cyclicsep.commuting_product import (Block, GNormalForm, GWord, SpecError, build_spec, conjugate,
                                         cyclic_membership, cyclically_reduce, format_nf, inv, locate, mul,
                                         normalize, power, syllable_length)
from cyclicsep.dsl import parse_word
from cyclicsep.finite_groups import dihedral
from cyclicsep.quotients import BaseHom, enumerate_G_quotients, induced_hom
from cyclicsep.arith import PiSet

from helpers import ABEL_TEXT, G22_TEXT, G24_TEXT, MIXED_TEXT, gmn_text, insert_relators, load, random_word

ALL_TEXTS = [G22_TEXT, G24_TEXT, MIXED_TEXT, ABEL_TEXT]


def nf(doc, spec, text):
    return normalize(spec, parse_word(doc, text))


# -- specs ------------------------------------------------------------------------

def test_build_spec_examples():
    Z_a, Z_b = AbelianGroup(1, names=["a"]), AbelianGroup(1, names=["b"])
    for m, n in ((1, 1), (2, 3), (4, 4)):
        spec = build_spec(Z_a, Z_b, [(m,)], [(n,)])
        assert spec.H.basis == ((m,),) and spec.K.basis == ((n,),)
    F2 = FreeGroup(["x", "y"])
    build_spec(F2, Z_b, [(1, 2)], [(1,)])
    with pytest.raises(SpecError):
        build_spec(F2, Z_b, [(1,), (2,)], [(1,)])
    with pytest.raises(SpecError):
        build_spec(F2, FreeGroup(["x"]), [(1,)], [(1,)])
    with pytest.raises(SpecError):
        build_spec(F2, Z_b, [(3,)], [(1,)])


def test_gmn_texts_build():
    for m in range(1, 5):
        for n in range(1, 5):
            load(gmn_text(m, n))


# -- normal forms -----------------------------------------------------------------

def test_normal_form_examples(g22):
    doc, spec = g22
    assert nf(doc, spec, "b^2 a^2") == GNormalForm((1, 1), (1, 1), ())
    assert nf(doc, spec, "a^3") == GNormalForm((1, 1), (), (Block("M", ((1,),)),))
    comm = nf(doc, spec, "a b a^-1 b^-1")
    assert len(comm.blocks) == 4 and not comm.is_identity()
    # D4 oracle: a -> r, b -> s satisfies [r^2, s^2] = 1 while [r, s] = r^2
    D4 = dihedral(4)
    r = 1
    s = next(x for x in range(8) if D4.element_order(x) == 2 and not D4.commute(x, r))
    psi = induced_hom(spec, BaseHom(spec.A, D4, (r,)), BaseHom(spec.B, D4, (s,)))
    assert psi.apply(parse_word(doc, "a b a^-1 b^-1")) == D4.mul(r, r) != 0


def test_identity_letters_dropped(g22):
    doc, spec = g22
    assert GWord([("A", ()), ("B", (1,))]) == GWord([("B", (1,))])
    assert normalize(spec, GWord()) == spec.identity
    with pytest.raises(Exception):
        normalize(spec, GWord([("A", (2,))]))


def test_block_invariants(g22):
    doc, spec = g22
    rng = random.Random(4)
    for _ in range(300):
        f = normalize(spec, random_word(rng, spec))
        kinds = [b.kind for b in f.blocks]
        assert all(x != y for x, y in zip(kinds, kinds[1:]))
        for b in f.blocks:
            assert b.syllables and all(any(s) for s in b.syllables)
            X, S = (spec.A, spec.H) if b.kind == "M" else (spec.B, spec.K)
            # the leading syllable is a nontrivial transversal element
            assert S.coset_rep(b.syllables[0]) == b.syllables[0]


@pytest.mark.parametrize("text", ALL_TEXTS)
def test_relator_insertion_invariance(text):
    doc, spec = load(text)
    rng = random.Random(hash(text) % 1000)
    for _ in range(500):
        w = random_word(rng, spec)
        w2 = insert_relators(rng, spec, w, rng.randint(1, 3))
        assert normalize(spec, w) == normalize(spec, w2)


@pytest.mark.parametrize("text", ALL_TEXTS)
def test_serialization_round_trip(text):
    doc, spec = load(text)
    rng = random.Random(8)
    for _ in range(200):
        f = normalize(spec, random_word(rng, spec))
        assert normalize(spec, parse_word(doc, format_nf(spec, f))) == f
        assert normalize(spec, f) == f


@pytest.mark.parametrize("text", [G22_TEXT, MIXED_TEXT])
def test_quotient_soundness(text):
    doc, spec = load(text)
    pi = PiSet.single(2)
    homs = list(enumerate_G_quotients(spec, pi, 4))
    rng = random.Random(9)
    words = [random_word(rng, spec) for _ in range(150)]
    for w in words:
        f = normalize(spec, w)
        for psi in homs:
            assert psi.apply(w) == psi.apply(f)


@pytest.mark.parametrize("text", ALL_TEXTS)
def test_group_laws(text):
    doc, spec = load(text)
    rng = random.Random(12)
    for _ in range(150):
        u, v, w = (random_word(rng, spec, 5) for _ in range(3))
        a, b, c = (normalize(spec, x) for x in (u, v, w))
        assert mul(spec, a, b) == normalize(spec, u + v)
        assert mul(spec, mul(spec, a, b), c) == mul(spec, a, mul(spec, b, c))
        assert inv(spec, inv(spec, a)) == a
        assert mul(spec, a, inv(spec, a)) == spec.identity


def test_mul_examples(g22):
    doc, spec = g22
    a, b = nf(doc, spec, "a"), nf(doc, spec, "b")
    assert mul(spec, mul(spec, a, b), inv(spec, b)) == a


# -- lengths, reduction, powers ---------------------------------------------------

def test_length_examples(g22):
    doc, spec = g22
    assert syllable_length(spec.identity) == 0
    assert syllable_length(nf(doc, spec, "a")) == 1
    assert syllable_length(nf(doc, spec, "a b")) == 2
    assert syllable_length(nf(doc, spec, "a^2 b^2")) == 1


def test_cyclic_reduction_examples(g22):
    doc, spec = g22
    core, conj = cyclically_reduce(spec, nf(doc, spec, "a b a^-1"))
    assert core == nf(doc, spec, "b") and conj == nf(doc, spec, "a")
    x = nf(doc, spec, "a b")
    assert cyclically_reduce(spec, x) == (x, spec.identity)
    x = nf(doc, spec, "a")
    assert cyclically_reduce(spec, x) == (x, spec.identity)


@pytest.mark.parametrize("text", ALL_TEXTS)
def test_cyclic_reduction_law(text):
    doc, spec = load(text)
    rng = random.Random(2)
    for _ in range(200):
        f = normalize(spec, random_word(rng, spec))
        core, conj = cyclically_reduce(spec, f)
        assert mul(spec, conj, mul(spec, core, inv(spec, conj))) == f
        if len(core.blocks) >= 2:
            assert core.blocks[0].kind != core.blocks[-1].kind


def test_power_examples(g22):
    doc, spec = g22
    assert syllable_length(power(spec, nf(doc, spec, "a b"), 2)) == 4
    assert syllable_length(power(spec, nf(doc, spec, "a"), 2)) == 1
    rng = random.Random(6)
    for _ in range(50):
        f = normalize(spec, random_word(rng, spec))
        for q in (2, 3, -2):
            slow = spec.identity
            for _ in range(abs(q)):
                slow = mul(spec, slow, f if q > 0 else inv(spec, f))
            assert power(spec, f, q) == slow


@pytest.mark.parametrize("text", [G22_TEXT, G24_TEXT, MIXED_TEXT])
def test_power_length_law(text):
    doc, spec = load(text)
    rng = random.Random(21)
    done = 0
    while done < 200:
        core, _ = cyclically_reduce(spec, normalize(spec, random_word(rng, spec)))
        L = syllable_length(core)
        if L < 2:
            continue
        for q in range(1, 6):
            assert syllable_length(power(spec, core, q)) == q * L
        done += 1


# -- membership -------------------------------------------------------------------

def test_cyclic_membership_examples(g22):
    doc, spec = g22
    assert cyclic_membership(spec, nf(doc, spec, "a b a b a b"), nf(doc, spec, "a b")) == 3
    assert cyclic_membership(spec, nf(doc, spec, "a^5"), nf(doc, spec, "a^2")) is None
    assert cyclic_membership(spec, nf(doc, spec, "b a"), nf(doc, spec, "a b")) is None
    # a quotient distinguishes ba from every power of ab with the same length
    homs = list(enumerate_G_quotients(spec, PiSet.single(2), 8))
    ab, ba = parse_word(doc, "a b"), parse_word(doc, "b a")
    assert any(psi.apply(ba) != psi.apply(ab) and psi.apply(ba) != psi.target.inv(psi.apply(ab)) for psi in homs)


@pytest.mark.parametrize("text", ALL_TEXTS)
def test_cyclic_membership_finds_powers(text):
    doc, spec = load(text)
    rng = random.Random(17)
    for _ in range(150):
        c = normalize(spec, random_word(rng, spec, 4))
        if c.is_identity():
            continue
        e = rng.randint(-4, 4)
        x = normalize(spec, random_word(rng, spec, 2))
        conj = conjugate(spec, c, x)
        g = power(spec, conj, e)
        f = cyclic_membership(spec, g, conj)
        assert f is not None and power(spec, conj, f) == g
        # a non-power: multiply by something outside <c>
        other = mul(spec, g, normalize(spec, random_word(rng, spec, 3)))
        f = cyclic_membership(spec, other, conj)
        if f is not None:
            assert power(spec, conj, f) == other


def test_locate_kinds(g22):
    doc, spec = g22
    assert locate(spec, spec.identity).kind == "identity"
    assert locate(spec, nf(doc, spec, "a b")).kind == "G"
    assert locate(spec, nf(doc, spec, "b a^3 b^-1")).kind == "A"
    assert locate(spec, nf(doc, spec, "a^2 b^2")).kind == "U"
