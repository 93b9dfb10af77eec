"""Exact integer utilities: prime sets, pi-parts, Bezout, and integer lattices.

Matrices are plain lists of rows of Python ints (arbitrary precision).  The
lattice helpers at the bottom work on row lattices inside ``Z^n`` and back all
of the abelian-group computations in :mod:`cyclicsep.base_groups`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

IntMatrix = list  # list[list[int]], rows x cols


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n >= 1`` in increasing order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, increasing."""
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PiSet:
    """A set of primes: either all primes (``prime is None``) or ``{prime}``."""

    prime: Optional[int] = None

    def __post_init__(self):
        if self.prime is not None and not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")

    @classmethod
    def all_primes(cls) -> "PiSet":
        return cls(None)

    @classmethod
    def single(cls, p: int) -> "PiSet":
        return cls(int(p))

    @classmethod
    def parse(cls, text) -> "PiSet":
        text = str(text).strip().lower()
        if text in ("all", "*", "allprimes"):
            return cls(None)
        try:
            p = int(text)
        except ValueError:
            raise ValueError(f"bad prime set {text!r}: expected 'all' or a prime") from None
        return cls(p)

    @property
    def is_all(self) -> bool:
        return self.prime is None

    def __contains__(self, p: int) -> bool:
        return self.prime is None or p == self.prime

    def complement_contains(self, p: int) -> bool:
        """True iff the prime ``p`` lies in the complement set."""
        return self.prime is not None and p != self.prime

    def is_pi_number(self, n: int) -> bool:
        n = abs(n)
        if n == 0:
            return False
        return pi_part(n, self)[1] == 1

    def is_coprime_number(self, n: int) -> bool:
        """True iff every prime factor of ``n`` lies outside the set (1 included)."""
        n = abs(n)
        if n == 0:
            return False
        return pi_part(n, self)[0] == 1

    def complement_primes(self, limit: int) -> list[int]:
        """Primes ``<= limit`` that are not in the set."""
        if self.prime is None:
            return []
        return [p for p in range(2, limit + 1) if is_prime(p) and p != self.prime]

    def __str__(self):
        return "all" if self.prime is None else str(self.prime)


def pi_part(n: int, pi: PiSet) -> tuple[int, int]:
    """Split ``n = q * t`` with ``q`` a pi-number and ``t`` free of primes in pi."""
    if n < 1:
        raise ValueError("pi_part needs a positive integer")
    if pi.prime is None:
        return n, 1
    p = pi.prime
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q, n


def bezout(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(a, b) > 0`` and ``u*a + v*b = g``."""
    if a == 0 and b == 0:
        raise ValueError("bezout(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


# -- matrices ---------------------------------------------------------------

def _as_matrix(M: Sequence[Sequence[int]], cols: Optional[int] = None) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in M]
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        if cols is not None and width != cols:
            raise ValueError(f"expected {cols} columns, got {width}")
    return rows


def identity_matrix(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(X, Y) -> list[list[int]]:
    if not X:
        return []
    inner = len(Y)
    cols = len(Y[0]) if Y else 0
    return [[sum(X[i][t] * Y[t][j] for t in range(inner)) for j in range(cols)]
            for i in range(len(X))]


def determinant(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = _as_matrix(M)
    n = len(A)
    if n == 0:
        return 1
    if any(len(r) != n for r in A):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M):
    """Return ``(S, U, V)`` with ``S = U*M*V`` diagonal, ``d1 | d2 | ...``, ``di >= 0``.

    ``U`` and ``V`` are unimodular.
    """
    A = _as_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity_matrix(m)
    V = identity_matrix(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        A[dst] = [x - f * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x - f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in A:
            row[dst] -= f * row[src]
        for row in V:
            row[dst] -= f * row[src]

    for t in range(min(m, n)):
        while True:
            # smallest nonzero entry of the trailing block goes to (t, t)
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return A, U, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    if A[t][j]:
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V


def hnf_with_transform(M):
    """Row-style Hermite normal form ``H = T*M`` with ``T`` unimodular.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``, and the
    zero rows are moved to the bottom.  The rows of ``T`` matching zero rows of
    ``H`` span the left kernel of ``M``.
    """
    A = _as_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    T = identity_matrix(m)
    row = 0
    for col in range(n):
        if row == m:
            break
        while True:
            nz = [i for i in range(row, m) if A[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[row], A[piv] = A[piv], A[row]
            T[row], T[piv] = T[piv], T[row]
            clean = True
            for i in range(row + 1, m):
                if A[i][col]:
                    f = A[i][col] // A[row][col]
                    A[i] = [x - f * y for x, y in zip(A[i], A[row])]
                    T[i] = [x - f * y for x, y in zip(T[i], T[row])]
                    if A[i][col]:
                        clean = False
            if clean:
                break
        if A[row][col] == 0:
            continue
        if A[row][col] < 0:
            A[row] = [-x for x in A[row]]
            T[row] = [-x for x in T[row]]
        p = A[row][col]
        for i in range(row):
            f = A[i][col] // p
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
                T[i] = [x - f * y for x, y in zip(T[i], T[row])]
        row += 1
    return A, T


def hermite_reduce(M):
    """Row-style Hermite normal form of ``M`` (same shape, zero rows last)."""
    return hnf_with_transform(M)[0]


# -- row lattices in Z^n ----------------------------------------------------

def lattice_basis(rows, n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical basis (nonzero HNF rows) of the lattice spanned by ``rows``."""
    rows = _as_matrix(rows, n)
    if not rows:
        return ()
    H = hermite_reduce(rows)
    return tuple(tuple(r) for r in H if any(r))


def _pivot(row) -> int:
    return next(j for j, x in enumerate(row) if x)


def lattice_reduce(basis, v) -> tuple[int, ...]:
    """Canonical representative of ``v`` modulo the lattice with HNF ``basis``."""
    v = list(v)
    for row in basis:
        j = _pivot(row)
        f = v[j] // row[j]
        if f:
            v = [x - f * y for x, y in zip(v, row)]
    return tuple(v)


def lattice_contains(basis, v) -> bool:
    return not any(lattice_reduce(basis, v))


def lattice_solve(rows, v) -> Optional[list[int]]:
    """Integer ``lam`` with ``sum(lam[i] * rows[i]) == v``, or ``None``."""
    rows = _as_matrix(rows)
    if not rows:
        return [] if not any(v) else None
    H, T = hnf_with_transform(rows)
    v = list(v)
    y = [0] * len(rows)
    for i, row in enumerate(H):
        if not any(row):
            break
        j = _pivot(row)
        if v[j] % row[j]:
            return None
        f = v[j] // row[j]
        y[i] = f
        v = [x - f * r for x, r in zip(v, row)]
    if any(v):
        return None
    return [sum(y[i] * T[i][k] for i in range(len(rows))) for k in range(len(rows))]


def left_kernel(rows) -> list[list[int]]:
    """Basis of ``{lam : lam * rows = 0}``."""
    rows = _as_matrix(rows)
    if not rows:
        return []
    H, T = hnf_with_transform(rows)
    return [T[i] for i, row in enumerate(H) if not any(row)]


def saturate(rows, n: int, pi: PiSet) -> tuple[tuple[int, ...], ...]:
    """HNF basis of ``{x in Z^n : q*x in L for some q free of primes in pi}``.

    ``L`` is the row lattice of ``rows``.  Computed on Smith coordinates: if
    ``L`` has invariant factor ``d`` along a Smith direction, the saturation
    has the pi-part of ``d`` there.
    """
    rows = _as_matrix(rows, n)
    if not rows:
        return ()
    if pi.is_all:
        return lattice_basis(rows, n)
    S, _, V = smith_normal_form(rows)
    Vinv = inverse_unimodular(V)
    out = []
    for i in range(min(len(S), n)):
        d = S[i][i]
        if d == 0:
            break
        q = pi_part(d, pi)[0]
        out.append([q * x for x in Vinv[i]])
    return lattice_basis(out, n) if out else ()


def inverse_unimodular(V) -> list[list[int]]:
    n = len(V)
    inv = []
    for k in range(n):
        e = [int(i == k) for i in range(n)]
        # columns of V^{-1}: solve V x = e via row lattice of V^T
        col = lattice_solve([list(r) for r in zip(*V)], e)
        inv.append(col)
    # inv[k] is column k of V^{-1}
    return [list(r) for r in zip(*inv)]


def invariant_factors(rows, n: int) -> list[int]:
    """Nonunit invariant factors of ``Z^n / L`` (``0`` stands for a free ``Z``)."""
    rows = _as_matrix(rows, n)
    diag = []
    if rows:
        S, _, _ = smith_normal_form(rows)
        diag = [S[i][i] for i in range(min(len(S), n))]
    diag += [0] * (n - len(diag))
    nonzero = sorted(d for d in diag if d not in (0, 1))
    return nonzero + [0] * sum(1 for d in diag if d == 0)


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0
