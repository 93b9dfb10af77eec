"""Shared spec texts and random word generators for the test suite."""
import random

from cyclicsep.base_groups import AbelianGroup, FreeGroup, free_inverse
from cyclicsep.commuting_product import GWord
from cyclicsep.dsl import parse_spec

G22_TEXT = """A = free(a)
B = free(b)
H = subgroup(A; a^2)
K = subgroup(B; b^2)
G = commprod(A, H, B, K)
pi = 2
"""
G23_TEXT = G22_TEXT.replace("b^2", "b^3")
G24_TEXT = G22_TEXT.replace("b^2", "b^4")

MIXED_TEXT = """A = free(x, y)
B = abelian(1, torsion=[4], names=[s, t])
H = subgroup(A; x y)
K = subgroup(B; (2, 1))
G = commprod(A, H, B, K)
"""

ABEL_TEXT = """A = abelian(2, names=[p, q])
B = abelian(1, names=[r])
H = subgroup(A; (2, 0))
K = subgroup(B; (3))
G = commprod(A, H, B, K)
"""


def gmn_text(m, n):
    return G22_TEXT.replace("a^2", f"a^{m}").replace("b^2", f"b^{n}")


def load(text):
    doc = parse_spec(text)
    return doc, doc.build()


def random_factor_element(rng, X, size=2):
    if isinstance(X, FreeGroup):
        w = []
        for _ in range(rng.randint(1, size)):
            w.append(rng.choice([1, -1]) * rng.randint(1, X.rank))
        return X.element(w)
    v = [rng.randint(-size, size) for _ in range(X.n)]
    return X.element(v)


def random_word(rng, spec, max_len=8, size=2):
    letters = []
    for _ in range(rng.randint(0, max_len)):
        tag = rng.choice("AB")
        letters.append((tag, random_factor_element(rng, spec.factor(tag), size)))
    return GWord(letters)


def _subgroup_element(rng, X, S, size=2):
    h = X.identity
    for g in S.gens:
        h = X.mul(h, X.pow(g, rng.randint(-size, size)))
    return h


def random_relator(rng, spec):
    """A word equal to the identity in G."""
    kind = rng.randrange(4)
    A, B = spec.A, spec.B
    if kind == 0:
        h = _subgroup_element(rng, A, spec.H)
        k = _subgroup_element(rng, B, spec.K)
        return GWord([("A", h), ("B", k), ("A", A.inv(h)), ("B", B.inv(k))])
    if kind == 1:
        tag = rng.choice("AB")
        X = spec.factor(tag)
        x = random_factor_element(rng, X)
        return GWord([(tag, x), (tag, X.inv(x))])
    if kind == 2:
        # a factor relation spelled letter by letter
        tag = rng.choice("AB")
        X = spec.factor(tag)
        if isinstance(X, FreeGroup):
            w = random_factor_element(rng, X, 3)
            return GWord([(tag, (l,)) for l in w] + [(tag, (l,)) for l in free_inverse(w)])
        letters = []
        for i, m in enumerate(X.torsion):
            letters += [(tag, X.generator(X.free_rank + i))] * m
        if X.n >= 2:
            x, y = X.generator(0), X.generator(1)
            letters += [(tag, x), (tag, y), (tag, X.inv(x)), (tag, X.inv(y))]
        return GWord(letters or [(tag, X.generator(0)), (tag, X.inv(X.generator(0)))])
    # conjugate of a commutator relation
    inner = random_relator_basic(rng, spec)
    u = random_word(rng, spec, 3)
    return u + inner + u.inverse(spec)


def random_relator_basic(rng, spec):
    A, B = spec.A, spec.B
    h = _subgroup_element(rng, A, spec.H)
    k = _subgroup_element(rng, B, spec.K)
    return GWord([("A", h), ("B", k), ("A", A.inv(h)), ("B", B.inv(k))])


def insert_relators(rng, spec, w, count=3):
    w = list(w)
    for _ in range(count):
        i = rng.randint(0, len(w))
        w[i:i] = list(random_relator(rng, spec))
    return GWord(w)
