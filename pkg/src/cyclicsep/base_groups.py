"""Computable factor groups: free groups of finite rank and f.g. abelian groups.

Elements are plain tuples and all arithmetic goes through the parent group:

* free group: reduced tuple of nonzero ints, ``i + 1`` for the i-th letter
  and ``-(i + 1)`` for its inverse;
* abelian group ``Z^f + Z/m_1 + ... + Z/m_t``: integer tuple of length
  ``f + t`` with the torsion coordinates reduced into ``[0, m_i)``.

Subgroups of free factors are cyclic (``CyclicSubgroup``); subgroups of
abelian factors are arbitrary (``AbelianSubgroup``, keyed by the HNF of the
lattice spanned by the generators and the torsion relations).
"""
from __future__ import annotations

from itertools import product
from math import gcd
from typing import Optional, Sequence

from .arith import (PiSet, bezout, factorize, invariant_factors, inverse_unimodular,
                    lattice_basis, lattice_contains, lattice_reduce, lattice_solve,
                    left_kernel, pi_part, saturate, smith_normal_form)


class GroupError(ValueError):
    """Element or subgroup does not fit the group it is used with."""


class UnsupportedShape(GroupError):
    """Operation requested on a subgroup shape outside the supported scope."""


# -- free groups --------------------------------------------------------------

def free_reduce(letters) -> tuple[int, ...]:
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def free_inverse(w) -> tuple[int, ...]:
    return tuple(-x for x in reversed(w))


def free_cyclic_reduce(w) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return ``(c, v)`` with ``w = c v c^-1`` and ``v`` cyclically reduced."""
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[:i]), tuple(w[i:j + 1])


def _period(v) -> int:
    n = len(v)
    for d in range(1, n + 1):
        if n % d == 0 and v[:d] * (n // d) == v:
            return d
    return n


def free_power(w, e: int) -> tuple[int, ...]:
    if e < 0:
        w, e = free_inverse(w), -e
    if e == 0:
        return ()
    c, v = free_cyclic_reduce(w)
    return c + v * e + free_inverse(c)


def primitive_root_free(w) -> tuple[tuple[int, ...], int]:
    """``(r, m)`` with ``w = r^m``, ``m >= 1`` and ``r`` not a proper power."""
    w = tuple(w)
    if not w:
        raise GroupError("the identity has no primitive root")
    c, v = free_cyclic_reduce(w)
    d = _period(v)
    return c + v[:d] + free_inverse(c), len(v) // d


def _word_key(w):
    return len(w), tuple(2 * (abs(x) - 1) + (x < 0) for x in w)


class FreeGroup:
    """Free group on named letters."""

    kind = "free"

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names:
            raise GroupError("a free group needs at least one letter")
        if len(set(names)) != len(names):
            raise GroupError(f"repeated letter names in {names}")
        self.names = names
        self.rank = len(names)
        self.identity: tuple[int, ...] = ()

    def __repr__(self):
        return f"FreeGroup({', '.join(self.names)})"

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.names == self.names

    def __hash__(self):
        return hash(("free", self.names))

    @property
    def ngens(self) -> int:
        return self.rank

    def generator(self, i: int) -> tuple[int, ...]:
        return (i + 1,)

    def element(self, data) -> tuple[int, ...]:
        data = tuple(int(x) for x in data)
        if any(x == 0 or abs(x) > self.rank for x in data):
            raise GroupError(f"{data} is not a word over {self.names}")
        return free_reduce(data)

    def from_exponents(self, pairs) -> tuple[int, ...]:
        """Word from ``(generator index, exponent)`` pairs."""
        out = []
        for i, e in pairs:
            out.extend([i + 1 if e > 0 else -(i + 1)] * abs(e))
        return free_reduce(out)

    def mul(self, x, y) -> tuple[int, ...]:
        i = 0
        n = min(len(x), len(y))
        while i < n and x[-1 - i] == -y[i]:
            i += 1
        return x[:len(x) - i] + y[i:]

    def inv(self, x) -> tuple[int, ...]:
        return free_inverse(x)

    def pow(self, x, e: int) -> tuple[int, ...]:
        return free_power(x, e) if x else ()

    def is_identity(self, x) -> bool:
        return not x

    def eq(self, x, y) -> bool:
        return tuple(x) == tuple(y)

    def commute(self, x, y) -> bool:
        return self.mul(x, y) == self.mul(y, x)

    def sort_key(self, x):
        return _word_key(x)

    def torsion_free(self) -> bool:
        return True

    def format(self, x) -> str:
        if not x:
            return "1"
        parts = []
        i = 0
        while i < len(x):
            j = i
            while j < len(x) and x[j] == x[i]:
                j += 1
            name = self.names[abs(x[i]) - 1]
            e = (j - i) * (1 if x[i] > 0 else -1)
            parts.append(name if e == 1 else f"{name}^{e}")
            i = j
        return " ".join(parts)


# -- f.g. abelian groups -------------------------------------------------------

class AbelianGroup:
    """``Z^free_rank + Z/m_1 + ... + Z/m_t`` with ``m_1 | m_2 | ... | m_t``."""

    kind = "abelian"

    def __init__(self, free_rank: int, torsion: Sequence[int] = (), names: Optional[Sequence[str]] = None):
        torsion = tuple(int(m) for m in torsion)
        if free_rank < 0:
            raise GroupError("negative free rank")
        if any(m < 2 for m in torsion):
            raise GroupError("torsion moduli must be >= 2")
        if any(b % a for a, b in zip(torsion, torsion[1:])):
            raise GroupError(f"torsion moduli {list(torsion)} are not a divisibility chain")
        n = free_rank + len(torsion)
        if n == 0:
            raise GroupError("the trivial group is not a supported factor")
        if names is None:
            names = tuple(f"g{i + 1}" for i in range(n))
        names = tuple(names)
        if len(names) != n:
            raise GroupError(f"expected {n} generator names, got {len(names)}")
        if len(set(names)) != n:
            raise GroupError(f"repeated generator names in {names}")
        self.free_rank = free_rank
        self.torsion = torsion
        self.names = names
        self.n = n
        self.identity = (0,) * n
        self.relations = tuple(
            tuple(m if j == free_rank + i else 0 for j in range(n))
            for i, m in enumerate(torsion))

    def __repr__(self):
        return f"AbelianGroup({self.free_rank}, torsion={list(self.torsion)})"

    def __eq__(self, other):
        return (isinstance(other, AbelianGroup) and other.free_rank == self.free_rank
                and other.torsion == self.torsion and other.names == self.names)

    def __hash__(self):
        return hash(("abelian", self.free_rank, self.torsion, self.names))

    @property
    def ngens(self) -> int:
        return self.n

    def generator(self, i: int) -> tuple[int, ...]:
        return self.element(int(j == i) for j in range(self.n))

    def _reduce(self, v) -> tuple[int, ...]:
        f = self.free_rank
        return tuple(v[:f]) + tuple(x % m for x, m in zip(v[f:], self.torsion))

    def element(self, data) -> tuple[int, ...]:
        data = tuple(int(x) for x in data)
        if len(data) != self.n:
            raise GroupError(f"{data} has the wrong length for {self!r}")
        return self._reduce(data)

    def from_exponents(self, pairs) -> tuple[int, ...]:
        v = [0] * self.n
        for i, e in pairs:
            v[i] += e
        return self._reduce(v)

    def mul(self, x, y):
        return self._reduce([a + b for a, b in zip(x, y)])

    def inv(self, x):
        return self._reduce([-a for a in x])

    def pow(self, x, e: int):
        return self._reduce([e * a for a in x])

    def is_identity(self, x) -> bool:
        return not any(x)

    def eq(self, x, y) -> bool:
        return tuple(x) == tuple(y)

    def commute(self, x, y) -> bool:
        return True

    def sort_key(self, x):
        return tuple(x)

    def torsion_free(self) -> bool:
        return not self.torsion

    def order(self, x) -> int:
        """Order of ``x``; 0 for infinite order."""
        if any(x[:self.free_rank]):
            return 0
        o = 1
        for a, m in zip(x[self.free_rank:], self.torsion):
            k = m // gcd(a, m)
            o = o * k // gcd(o, k)
        return o

    def format(self, x) -> str:
        parts = []
        for name, e in zip(self.names, x):
            if e:
                parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts) if parts else "1"


BaseGroup = (FreeGroup, AbelianGroup)


# -- subgroups -------------------------------------------------------------------

class CyclicSubgroup:
    """Cyclic subgroup ``<w>`` of a free group; ``w = root^exp``."""

    def __init__(self, group: FreeGroup, gen):
        self.group = group
        self.gen = group.element(gen)
        if self.gen:
            self.root, self.exp = primitive_root_free(self.gen)
        else:
            self.root, self.exp = (), 0
        # cyclic core of the generator, for coset windows
        self._core_len = len(free_cyclic_reduce(self.gen)[1])

    def __repr__(self):
        return f"<{self.group.format(self.gen)}>"

    def key(self):
        if not self.gen:
            return ("free", ())
        # <w> = <w^-1>; pick the (length, lex)-smaller generator
        return ("free", min(self.gen, free_inverse(self.gen), key=_word_key))

    def __eq__(self, other):
        return isinstance(other, CyclicSubgroup) and self.group == other.group and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def gens(self):
        return (self.gen,)

    @property
    def ngens(self) -> int:
        return 1

    def is_trivial(self) -> bool:
        return not self.gen

    def membership(self, x) -> Optional[int]:
        """Exponent ``e`` with ``x = w^e``, or ``None``."""
        x = tuple(x)
        if not x:
            return 0
        if not self.gen:
            return None
        r, m = primitive_root_free(x)
        if r == self.root and m % self.exp == 0:
            return m // self.exp
        if r == free_inverse(self.root) and m % self.exp == 0:
            return -(m // self.exp)
        return None

    def contains(self, x) -> bool:
        return self.membership(x) is not None

    def coords(self, x) -> Optional[tuple[int, ...]]:
        e = self.membership(x)
        return None if e is None else (e,)

    def relation_rows(self) -> list[tuple[int, ...]]:
        return [] if self.gen else [(1,)]

    def from_coords(self, lam):
        return self.group.pow(self.gen, lam[0]) if self.gen else ()

    def coset_rep(self, x):
        """(length, lex)-minimal element of the right coset ``<w> x``."""
        x = tuple(x)
        if not self.gen:
            return x
        G = self.group
        bound = 2 * len(x) // self._core_len + 1
        best = x
        for w in (self.gen, free_inverse(self.gen)):
            cur = x
            for _ in range(bound):
                cur = G.mul(w, cur)
                if _word_key(cur) < _word_key(best):
                    best = cur
        return best


class AbelianSubgroup:
    """Subgroup of an abelian factor generated by ``gens``."""

    def __init__(self, group: AbelianGroup, gens):
        self.group = group
        self._gens = tuple(group.element(g) for g in gens)
        self.basis = lattice_basis(list(self._gens) + list(group.relations), group.n)

    def __repr__(self):
        return f"<{', '.join(self.group.format(g) for g in self._gens) or '1'}>"

    def key(self):
        return ("abelian", self.basis)

    def __eq__(self, other):
        return isinstance(other, AbelianSubgroup) and self.group == other.group and self.basis == other.basis

    def __hash__(self):
        return hash(self.key())

    @property
    def gens(self):
        return self._gens

    @property
    def ngens(self) -> int:
        return len(self._gens)

    def is_trivial(self) -> bool:
        return all(self.group.is_identity(g) for g in self._gens)

    def contains(self, x) -> bool:
        return lattice_contains(self.basis, x)

    def membership(self, x) -> Optional[tuple[int, ...]]:
        """Coefficients ``lam`` with ``sum(lam_i * gen_i) = x``, or ``None``."""
        rows = list(self._gens) + list(self.group.relations)
        lam = lattice_solve(rows, x)
        if lam is None:
            return None
        return tuple(lam[:len(self._gens)])

    coords = membership

    def relation_rows(self) -> list[tuple[int, ...]]:
        """Coefficient vectors of gens that vanish in the group."""
        k = len(self._gens)
        rows = list(self._gens) + list(self.group.relations)
        out = [tuple(v[:k]) for v in left_kernel(rows) if any(v[:k])]
        return list(lattice_basis(out, k)) if out and k else []

    def from_coords(self, lam):
        v = [0] * self.group.n
        for c, g in zip(lam, self._gens):
            for j in range(self.group.n):
                v[j] += c * g[j]
        return self.group.element(v)

    def coset_rep(self, x):
        return self.group.element(lattice_reduce(self.basis, x))

    def invariants(self) -> list[int]:
        """Invariant factors of the subgroup as an abstract group (0 = Z)."""
        k = len(self.basis)
        if k == 0:
            return []
        rel = [lattice_solve(self.basis, r) for r in self.group.relations]
        return invariant_factors(rel, k) if rel else [0] * k

    def is_cyclic(self) -> bool:
        return len(self.invariants()) <= 1

    def cyclic_generator(self):
        """A generator when the subgroup is cyclic, else ``None``."""
        k = len(self.basis)
        if k == 0:
            return self.group.identity
        rel = [lattice_solve(self.basis, r) for r in self.group.relations]
        if not rel:
            if k != 1:
                return None
            return self.group.element(self.basis[0])
        S, _, V = smith_normal_form(rel)
        diag = [S[i][i] if i < len(S) else 0 for i in range(k)]
        # in coordinates y*V the relations are diagonal; row j of V^-1 is the new basis vector
        Vinv = inverse_unimodular(V)
        new_basis = [[sum(Vinv[j][i] * self.basis[i][t] for i in range(k)) for t in range(self.group.n)]
                     for j in range(k)]
        nontriv = [j for j in range(k) if diag[j] != 1]
        if len(nontriv) > 1:
            return None
        if not nontriv:
            return self.group.identity
        return self.group.element(new_basis[nontriv[0]])


def subgroup(X, gens) -> "CyclicSubgroup | AbelianSubgroup":
    """Subgroup of the factor ``X`` generated by ``gens``."""
    gens = [X.element(g) for g in gens]
    if isinstance(X, AbelianGroup):
        return AbelianSubgroup(X, gens)
    nontrivial = [g for g in gens if g]
    if not nontrivial:
        return CyclicSubgroup(X, ())
    root = primitive_root_free(nontrivial[0])[0]
    exps = []
    for g in nontrivial:
        r, m = primitive_root_free(g)
        if r == root:
            exps.append(m)
        elif r == free_inverse(root):
            exps.append(-m)
        else:
            raise UnsupportedShape(
                f"subgroup of {X!r} generated by {[X.format(g) for g in gens]} is not cyclic")
    e = 0
    for m in exps:
        e = gcd(e, m)
    return CyclicSubgroup(X, free_power(root, e))


def cyclic_subgroup(X, c):
    return subgroup(X, [c])


def membership(X, H, x):
    """Exponent (free) or coefficient vector (abelian) expressing ``x`` in ``H``."""
    if H.group != X:
        raise GroupError("subgroup belongs to another group")
    return H.membership(X.element(x))


def coset_rep(X, H, x):
    if H.group != X:
        raise GroupError("subgroup belongs to another group")
    return H.coset_rep(X.element(x))


def isolator_cyclic_base(X, c, pi: PiSet):
    """Least subgroup containing ``c`` that is closed under roots of orders coprime to pi."""
    c = X.element(c)
    if isinstance(X, FreeGroup):
        if not c:
            return CyclicSubgroup(X, ())
        r, m = primitive_root_free(c)
        q, _ = pi_part(m, pi)
        return CyclicSubgroup(X, free_power(r, q))
    return isolator_abelian(X, AbelianSubgroup(X, [c]), pi)


def isolator_abelian(X: AbelianGroup, H: AbelianSubgroup, pi: PiSet) -> AbelianSubgroup:
    basis = saturate(list(H.basis) or [X.identity], X.n, pi)
    if not basis:
        return AbelianSubgroup(X, [])
    return AbelianSubgroup(X, [X.element(r) for r in basis])


def is_isolated_subgroup_base(X, H, pi: PiSet) -> bool:
    if isinstance(H, CyclicSubgroup):
        return H.is_trivial() or pi.is_pi_number(H.exp)
    return isolator_abelian(X, H, pi) == H


def separable_closure_base(X, C, pi: PiSet):
    """Closure of a cyclic subgroup (or of ``<c>`` for an element) under separation.

    For free groups and f.g. abelian groups every subgroup closed under
    coprime-order roots is separable, so the closure is the isolator.
    """
    if isinstance(C, AbelianSubgroup):
        return isolator_abelian(X, C, pi)
    if isinstance(C, CyclicSubgroup):
        return isolator_cyclic_base(X, C.gen, pi)
    return isolator_cyclic_base(X, C, pi)


def pi_prime_torsion_free(X, pi: PiSet) -> bool:
    if isinstance(X, FreeGroup):
        return True
    return all(pi.is_pi_number(m) for m in X.torsion)


def cyclic_join(X, x, y, q: int):
    """Generator ``t`` of ``<x, y>`` given commuting ``x, y`` and ``y^q in <x>``."""
    x, y = X.element(x), X.element(y)
    if q < 1:
        raise GroupError("q must be positive")
    if not X.commute(x, y):
        raise GroupError("cyclic_join needs commuting elements")
    yq = X.pow(y, q)
    k = _exponent_in_cyclic(X, x, yq)
    if k is None:
        raise GroupError("precondition y^q in <x> fails")
    d = gcd(q, k) if k else q
    q1, k1 = q // d, k // d
    if not X.eq(X.pow(y, q1), X.pow(x, k1)):
        raise GroupError("ambient group has torsion of order dividing q; <x, y> need not be cyclic")
    if q1 == 1:
        return x
    _, u, v = bezout(k1, q1)
    return X.mul(X.pow(y, u), X.pow(x, v))


def _exponent_in_cyclic(X, x, z) -> Optional[int]:
    """Some ``k`` with ``z = x^k``, or ``None``."""
    if isinstance(X, FreeGroup):
        return CyclicSubgroup(X, x).membership(z)
    lam = AbelianSubgroup(X, [x]).membership(z)
    return None if lam is None else lam[0]


def isolation_witness_base(X, H, pi: PiSet):
    """``(x, p)`` with ``x`` outside ``H``, ``x^p`` in ``H`` and ``p`` a prime outside pi.

    Returns ``None`` when ``H`` is isolated.
    """
    if is_isolated_subgroup_base(X, H, pi):
        return None
    if isinstance(H, CyclicSubgroup):
        q, t = pi_part(H.exp, pi)
        cand = free_power(H.root, q)
        return _reduce_witness(X, H, cand, t)
    I = isolator_abelian(X, H, pi)
    for g in I.gens:
        if not H.contains(g):
            # every isolator element has some coprime power in H
            o = _coprime_exponent(X, H, g, pi)
            return _reduce_witness(X, H, g, o)
    raise AssertionError("isolator strictly larger but no generator escapes")


def _coprime_exponent(X, H, g, pi: PiSet) -> int:
    # order of g modulo H; finite and coprime to pi because g lies in the isolator
    m = 1
    while not H.contains(X.pow(g, m)):
        m += 1
    return m


def _reduce_witness(X, H, x, q: int):
    for p in factorize(q):
        xp = X.pow(x, p)
        if H.contains(xp):
            return x, p
        x = xp
    raise AssertionError("witness exponent does not land in the subgroup")


def ball(dim: int, radius: int):
    """Integer vectors with entries in ``[-radius, radius]``, small entries first."""
    rng = sorted(range(-radius, radius + 1), key=lambda v: (abs(v), v < 0))
    return product(rng, repeat=dim)
