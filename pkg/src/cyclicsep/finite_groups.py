"""Finite groups as Cayley tables, the small p-group catalog, and subgroup testbeds.

Elements are indices ``0..order-1`` with the identity at index 0.  The
testbed functions evaluate separability, isolation and quasi-regularity
literally, by scanning subgroups, so they can serve as brute-force oracles
for the statements they encode.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .arith import PiSet, is_prime, pi_part


class FiniteGroupError(ValueError):
    pass


class FiniteGroup:
    """Group given by a Cayley table; ``table[a][b]`` is the index of ``a*b``."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "P", check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name
        if check:
            self._check()
        self.inverse = tuple(row.index(0) for row in self.table)

    def _check(self):
        n = self.order
        if n == 0 or any(len(row) != n for row in self.table):
            raise FiniteGroupError("Cayley table must be square and nonempty")
        T = np.array(self.table, dtype=np.int64)
        if T.min() < 0 or T.max() >= n:
            raise FiniteGroupError("table entries out of range")
        full = np.arange(n)
        if not (np.array_equal(T[0], full) and np.array_equal(T[:, 0], full)):
            raise FiniteGroupError("index 0 is not a two-sided identity")
        if any(len(set(row)) != n for row in self.table) or any(len(set(T[:, j])) != n for j in range(n)):
            raise FiniteGroupError("table is not a Latin square")
        # (ab)c == a(bc) for all triples
        left = T[T[:, :, None], full[None, None, :]]
        right = T[full[:, None, None], T[None, :, :]]
        if not np.array_equal(left, right):
            raise FiniteGroupError("table is not associative")

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inverse[a], -e
        result, base = 0, a
        while e:
            if e & 1:
                result = self.table[result][base]
            base = self.table[base][base]
            e >>= 1
        return result

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def commute(self, a: int, b: int) -> bool:
        return self.table[a][b] == self.table[b][a]

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in range(self.order) for b in range(a + 1, self.order))

    def conjugate(self, a: int, x: int) -> int:
        """``x^-1 a x``."""
        return self.table[self.table[self.inverse[x]][a]][x]

    def center_size(self) -> int:
        return sum(all(self.commute(a, b) for b in range(self.order)) for a in range(self.order))

    def order_profile(self) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        for a in range(self.order):
            o = self.element_order(a)
            counts[o] = counts.get(o, 0) + 1
        return tuple(sorted(counts.items()))

    def invariants(self):
        """Cheap isomorphism invariants used for screening."""
        return (self.order, self.order_profile(), self.is_abelian(), self.center_size())


def from_elements(elements: Sequence, mul: Callable, name: str) -> FiniteGroup:
    """Cayley table of ``elements`` (identity first) under ``mul``."""
    index = {e: i for i, e in enumerate(elements)}
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, name)


# -- constructions --------------------------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    return from_elements(list(range(n)), lambda a, b: (a + b) % n, f"C{n}")


def abelian(moduli: Sequence[int]) -> FiniteGroup:
    moduli = tuple(moduli)
    elems = list(product(*[range(m) for m in moduli]))
    name = "x".join(f"C{m}" for m in moduli)
    return from_elements(elems, lambda a, b: tuple((x + y) % m for x, y, m in zip(a, b, moduli)), name)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    elems = [(a, b) for a in range(G.order) for b in range(H.order)]
    return from_elements(elems, lambda x, y: (G.mul(x[0], y[0]), H.mul(x[1], y[1])), f"{G.name}x{H.name}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order ``2n``; elements ``(i, s)`` mean ``r^i s^s``."""
    elems = [(i, s) for s in (0, 1) for i in range(n)]

    def mul(x, y):
        i, s = x
        j, t = y
        return ((i + (-j if s else j)) % n, s ^ t)
    return from_elements(elems, mul, f"D{n}")


def quaternion() -> FiniteGroup:
    # (sign, unit) with units 0=1, 1=i, 2=j, 3=k
    unit_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    elems = [(1, 0)] + [(s, u) for s in (1, -1) for u in range(4) if (s, u) != (1, 0)]

    def mul(x, y):
        s, u = unit_mul[(x[1], y[1])]
        return (x[0] * y[0] * s, u)
    return from_elements(elems, mul, "Q8")


def heisenberg(p: int) -> FiniteGroup:
    """Unitriangular 3x3 matrices over ``F_p``: ``(a, b, c)`` with the ``ab'`` cocycle."""
    elems = list(product(range(p), repeat=3))
    return from_elements(elems, lambda x, y: ((x[0] + y[0]) % p, (x[1] + y[1]) % p,
                                         (x[2] + y[2] + x[0] * y[1]) % p), f"Heis{p}")


def metacyclic(p: int) -> FiniteGroup:
    """``C_{p^2} x| C_p`` with the generator of ``C_p`` acting by ``x -> (1+p)x``."""
    n = p * p
    elems = [(x, y) for y in range(p) for x in range(n)]

    def mul(a, b):
        return ((a[0] + pow(1 + p, a[1], n) * b[0]) % n, (a[1] + b[1]) % p)
    return from_elements(elems, mul, f"M{p ** 3}")


def symmetric(n: int) -> FiniteGroup:
    elems = sorted(permutations(range(n)))
    return from_elements(elems, lambda a, b: tuple(a[b[i]] for i in range(n)), f"S{n}")


def alternating(n: int) -> FiniteGroup:
    def even(p):
        inv = sum(1 for i, j in combinations(range(n), 2) if p[i] > p[j])
        return inv % 2 == 0
    elems = [p for p in sorted(permutations(range(n))) if even(p)]
    return from_elements(elems, lambda a, b: tuple(a[b[i]] for i in range(n)), f"A{n}")


def _partitions(k: int, largest: Optional[int] = None):
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _catalog_order(p: int, k: int) -> tuple[FiniteGroup, ...]:
    groups = []
    for part in _partitions(k):
        moduli = tuple(sorted((p ** e for e in part)))
        groups.append(cyclic(moduli[0]) if len(moduli) == 1 else abelian(tuple(reversed(moduli))))
    if k == 3:
        if p == 2:
            groups += [dihedral(4), quaternion()]
        else:
            groups += [heisenberg(p), metacyclic(p)]
    return tuple(groups)


def pgroup_catalog(p: int, max_order: int) -> list[FiniteGroup]:
    """Groups of order ``p, ..., max_order`` up to isomorphism.

    Complete through order ``p^3``; order ``p^4`` contributes its abelian groups only.
    """
    if not is_prime(p):
        raise FiniteGroupError(f"{p} is not prime")
    k, m = 0, max_order
    while m % p == 0 and m > 1:
        m //= p
        k += 1
    if m != 1 or k == 0:
        raise FiniteGroupError(f"max_order {max_order} is not a power of {p}")
    if k > 4:
        raise FiniteGroupError(f"catalog stops at order {p}^4")
    out: list[FiniteGroup] = []
    for j in range(1, k + 1):
        out.extend(_catalog_order(p, j))
    return out


# -- subgroups -----------------------------------------------------------------------

class FiniteSubgroup(tuple):
    """Sorted tuple of element indices of a subgroup."""

    def __new__(cls, elements: Iterable[int]):
        return super().__new__(cls, sorted(set(elements)))

    @property
    def order(self) -> int:
        return len(self)

    def __repr__(self):
        return f"FiniteSubgroup({list(self)})"


def generated(P: FiniteGroup, gens: Iterable[int]) -> FiniteSubgroup:
    elems = {0}
    frontier = [0]
    gens = [g for g in gens]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = P.table[x][g]
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return FiniteSubgroup(elems)


def cyclic_closure(P: FiniteGroup, x: int) -> FiniteSubgroup:
    elems = [0]
    y = x
    while y != 0:
        elems.append(y)
        y = P.table[y][x]
    return FiniteSubgroup(elems)


def is_subgroup(P: FiniteGroup, S: Iterable[int]) -> bool:
    S = set(S)
    return 0 in S and all(P.table[a][P.inverse[b]] in S for a in S for b in S)


def all_subgroups(P: FiniteGroup) -> list[FiniteSubgroup]:
    """Every subgroup, ordered by size then lexicographically."""
    cyclics = {cyclic_closure(P, x) for x in range(P.order)}
    found = set(cyclics)
    frontier = set(cyclics)
    while frontier:
        new = set()
        for S in frontier:
            for C in cyclics:
                if not set(C) <= set(S):
                    J = generated(P, list(S) + list(C))
                    if J not in found:
                        new.add(J)
        found |= new
        frontier = new
    return sorted(found, key=lambda S: (len(S), tuple(S)))


def is_normal(P: FiniteGroup, N: Sequence[int], over: Optional[Sequence[int]] = None) -> bool:
    over = range(P.order) if over is None else over
    Nset = set(N)
    return all(P.conjugate(a, x) in Nset for a in N for x in over)


def product_set(P: FiniteGroup, Y: Sequence[int], N: Sequence[int]) -> FiniteSubgroup:
    return FiniteSubgroup(P.table[y][n] for y in Y for n in N)


def intersect(Y: Sequence[int], N: Sequence[int]) -> FiniteSubgroup:
    return FiniteSubgroup(set(Y) & set(N))


def normal_core(P: FiniteGroup, M: Sequence[int], over: Sequence[int]) -> FiniteSubgroup:
    """Largest subgroup of ``M`` normal in ``over``: intersect ``M^x`` over coset reps."""
    Mset, overset = set(M), set(over)
    if not Mset <= overset:
        raise FiniteGroupError("normal_core needs M inside `over`")
    reps, covered = [], set()
    for x in sorted(overset):
        if x not in covered:
            reps.append(x)
            covered |= {P.table[m][x] for m in Mset}
    core = Mset
    for x in reps:
        core = core & {P.conjugate(m, x) for m in Mset}
    return FiniteSubgroup(core)


def omega_pi_finite(P: FiniteGroup, pi: PiSet, within: Optional[Sequence[int]] = None) -> list[FiniteSubgroup]:
    """Normal subgroups of pi-power index (of ``within``, default all of ``P``)."""
    Y = FiniteSubgroup(range(P.order) if within is None else within)
    subs = [S for S in all_subgroups(P) if set(S) <= set(Y)]
    return [S for S in subs if is_normal(P, S, Y) and pi.is_pi_number(len(Y) // len(S))]


def is_separable_in_finite(P: FiniteGroup, Y: Sequence[int], pi: PiSet) -> bool:
    closure = set(range(P.order))
    for N in omega_pi_finite(P, pi):
        closure &= set(product_set(P, Y, N))
    return closure == set(Y)


def quasi_regular_finite(P: FiniteGroup, Y: Sequence[int], pi: PiSet) -> bool:
    omega_P = omega_pi_finite(P, pi)
    for M in omega_pi_finite(P, pi, within=Y):
        if not any(set(intersect(N, Y)) <= set(M) for N in omega_P):
            return False
    return True


def is_isolated_finite(P: FiniteGroup, Y: Sequence[int], pi: PiSet) -> bool:
    """Element scan: ``x^q in Y`` for a number ``q`` coprime to pi forces ``x in Y``."""
    Yset = set(Y)
    for x in range(P.order):
        if x in Yset:
            continue
        o = P.element_order(x)
        for q in range(1, o + 1):
            if pi.is_coprime_number(q) and P.pow(x, q) in Yset:
                return False
    return True


def isolator_finite(P: FiniteGroup, Y: Sequence[int], pi: PiSet) -> FiniteSubgroup:
    """Least subgroup containing ``Y`` closed under roots of orders coprime to pi."""
    cur = FiniteSubgroup(Y)
    while True:
        cset = set(cur)
        # some coprime q has x^q in cur  <=>  x^t in cur, t the coprime part of ord(x)
        roots = [x for x in range(P.order)
                 if x not in cset and P.pow(x, pi_part(P.element_order(x), pi)[1]) in cset]
        if not roots:
            return cur
        cur = generated(P, list(cur) + roots)


def generating_set(P: FiniteGroup) -> list[int]:
    """Greedy generating set, taking elements of large order first."""
    gens: list[int] = []
    span = FiniteSubgroup([0])
    for x in sorted(range(P.order), key=lambda a: (-P.element_order(a), a)):
        if x not in span:
            gens.append(x)
            span = generated(P, gens)
    return gens


def is_isomorphic(P: FiniteGroup, Q: FiniteGroup) -> bool:
    """Search generator images in ``Q`` that extend to an isomorphism."""
    if P.invariants() != Q.invariants():
        return False
    gens = generating_set(P)
    choices = [[y for y in range(Q.order) if Q.element_order(y) == P.element_order(g)] for g in gens]
    for images in product(*choices):
        phi = {0: 0}
        frontier = [0]
        ok = True
        while frontier and ok:
            new = []
            for x in frontier:
                for g, y in zip(gens, images):
                    a, b = P.mul(x, g), Q.mul(phi[x], y)
                    if a in phi:
                        if phi[a] != b:
                            ok = False
                            break
                    else:
                        phi[a] = b
                        new.append(a)
                if not ok:
                    break
            frontier = new
        if ok and len(set(phi.values())) == P.order and all(
                phi[P.mul(a, b)] == Q.mul(phi[a], phi[b]) for a in range(P.order) for b in range(P.order)):
            return True
    return False


# -- exhaustive table search (catalog completeness) ------------------------------------

def search_groups_of_order(n: int) -> list[FiniteGroup]:
    """All groups of order ``n`` up to relabelling, by backtracking on Cayley tables.

    The labelling is normalised around an element ``g`` of maximal order ``k``:
    element ``i*k + j`` stands for ``h_i g^j`` with ``h_0 = 1``.  Right
    multiplication by powers of ``g`` is then fixed, so only the columns of the
    coset leaders ``h_i`` are searched.  Every group admits such a labelling,
    so every isomorphism class appears at least once.
    """
    found = []
    for k in range(n, 0, -1):
        if n % k:
            continue
        found.extend(_search_with_max_order(n, k))
        # groups whose maximal element order is k are found here; keep going for smaller k
    return found


def _search_with_max_order(n: int, k: int) -> list[FiniteGroup]:
    cosets = n // k

    def right_pow(x, e):
        i, j = divmod(x, k)
        return i * k + (j + e) % k

    T = [[-1] * n for _ in range(n)]
    for x in range(n):
        for j in range(k):
            T[x][j] = right_pow(x, j)
    for i in range(cosets):
        T[0][i * k] = i * k
        for j in range(k):
            T[0][i * k + j] = i * k + j
    results = []
    leaders = [i * k for i in range(1, cosets)]

    def set_cell(x, y, v):
        """Record ``x*y = v`` with the implied ``x*y g^j``; False on a clash."""
        col, off = (y // k) * k, y % k
        base = right_pow(v, -off)
        row = T[x]
        if row[col] >= 0:
            return row[col] == base
        for j in range(k):
            w = right_pow(base, j)
            if w in row or any(T[z][col + j] == w for z in range(n)):
                return False
        for j in range(k):
            row[col + j] = right_pow(base, j)
        return True

    def propagate():
        """Close under ``(ab)c = a(bc)`` wherever one side is known."""
        changed = True
        while changed:
            changed = False
            for a in range(n):
                Ta = T[a]
                for b in range(n):
                    ab = Ta[b]
                    if ab < 0:
                        continue
                    Tab, Tb = T[ab], T[b]
                    for c in range(n):
                        bc = Tb[c]
                        if bc < 0:
                            continue
                        l, r = Tab[c], Ta[bc]
                        if l >= 0 and r >= 0:
                            if l != r:
                                return False
                        elif l >= 0:
                            if not set_cell(a, bc, l):
                                return False
                            changed = True
                        elif r >= 0:
                            if not set_cell(ab, c, r):
                                return False
                            changed = True
        return True

    def backtrack():
        cell = next(((x, col) for col in leaders for x in range(n) if T[x][col] < 0), None)
        if cell is None:
            try:
                G = FiniteGroup([list(r) for r in T], f"search{len(results)}")
            except FiniteGroupError:
                return
            if max(G.element_order(a) for a in range(n)) == k:
                results.append(G)
            return
        x, col = cell
        for v in range(n):
            saved = [row[:] for row in T]
            if set_cell(x, col, v) and propagate():
                backtrack()
            T[:] = saved

    if propagate():
        backtrack()
    return results


def core_chain(P: FiniteGroup, chain: Sequence[Sequence[int]], M: Sequence[int]) -> FiniteSubgroup:
    """Push ``M`` normal in ``chain[0]`` down to a subgroup normal in ``P``.

    ``chain`` is ``Y = Y_0, Y_1, ..., Y_r = P`` with each ``Y_i`` normal in
    ``Y_{i+1}``; the result is the iterated normal core of ``M``.
    """
    cur = FiniteSubgroup(M)
    for over in chain[1:]:
        cur = normal_core(P, cur, over)
    return cur
