"""Homomorphisms from the factors and from ``G`` into cataloged finite p-groups."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from .arith import PiSet, is_prime
from .base_groups import AbelianGroup, FreeGroup
from .commuting_product import CommProdSpec, GNormalForm, GWord, word_of
from .finite_groups import FiniteGroup, pgroup_catalog


class HomBudgetError(RuntimeError):
    """Enumeration exceeded its budget; ``frontier`` is the last order fully searched."""

    def __init__(self, message: str, frontier: int = 0):
        super().__init__(message)
        self.frontier = frontier


@dataclass(frozen=True)
class BaseHom:
    source: object
    target: FiniteGroup
    images: tuple

    def apply(self, x) -> int:
        P, X = self.target, self.source
        if isinstance(X, FreeGroup):
            r = 0
            for letter in x:
                img = self.images[abs(letter) - 1]
                r = P.mul(r, img if letter > 0 else P.inv(img))
            return r
        r = 0
        for img, e in zip(self.images, x):
            if e:
                r = P.mul(r, P.pow(img, e))
        return r


def _abelian_ok(X: AbelianGroup, P: FiniteGroup, images) -> bool:
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if not P.commute(images[i], images[j]):
                return False
    for i, m in enumerate(X.torsion):
        if P.pow(images[X.free_rank + i], m) != 0:
            return False
    return True


def enumerate_base_homs(X, P: FiniteGroup, limit: int = 10 ** 6) -> list[BaseHom]:
    """Every homomorphism ``X -> P``, by generator images in lexicographic order."""
    n = X.ngens
    if P.order ** n > limit:
        raise HomBudgetError(f"{P.order}^{n} generator-image tuples exceed the limit {limit}")
    out = []
    for images in product(range(P.order), repeat=n):
        if isinstance(X, AbelianGroup) and not _abelian_ok(X, P, images):
            continue
        out.append(BaseHom(X, P, images))
    return out


def commuting_compatible(phi_A: BaseHom, phi_B: BaseHom, H, K) -> bool:
    """Images of the generators of ``H`` and ``K`` commute pairwise."""
    P = phi_A.target
    hs = [phi_A.apply(h) for h in H.gens]
    ks = [phi_B.apply(k) for k in K.gens]
    return all(P.commute(x, y) for x in hs for y in ks)


class IncompatibleHoms(ValueError):
    pass


@dataclass(frozen=True)
class GHom:
    spec: CommProdSpec
    phi_A: BaseHom
    phi_B: BaseHom

    @property
    def target(self) -> FiniteGroup:
        return self.phi_A.target

    def apply(self, w) -> int:
        if isinstance(w, GNormalForm):
            w = word_of(self.spec, w)
        P = self.target
        r = 0
        for tag, e in w:
            phi = self.phi_A if tag == "A" else self.phi_B
            r = P.mul(r, phi.apply(e))
        return r


def induced_hom(spec: CommProdSpec, phi_A: BaseHom, phi_B: BaseHom) -> GHom:
    if phi_A.target != phi_B.target:
        raise IncompatibleHoms("factor homomorphisms have different targets")
    if not commuting_compatible(phi_A, phi_B, spec.H, spec.K):
        raise IncompatibleHoms("images of H and K do not commute")
    return GHom(spec, phi_A, phi_B)


def apply(psi: GHom, w) -> int:
    return psi.apply(w)


def target_groups(pi: PiSet, max_order: int) -> list[FiniteGroup]:
    """Catalog groups of order at most ``max_order`` whose order is a pi-number.

    Sorted by order; groups of equal order keep their catalog order.
    """
    if pi.is_all:
        primes = [p for p in range(2, max_order + 1) if is_prime(p)]
    else:
        primes = [pi.prime] if pi.prime <= max_order else []
    groups = []
    for p in primes:
        top = p
        while top * p <= max_order and top * p <= p ** 4:
            top *= p
        for idx, P in enumerate(pgroup_catalog(p, top)):
            groups.append((P.order, idx, P))
    groups.sort(key=lambda t: (t[0], t[1]))
    return [P for _, _, P in groups]


def enumerate_G_quotients(spec: CommProdSpec, pi: PiSet, max_order: int,
                          budget: Optional[int] = None,
                          targets: Optional[Sequence[FiniteGroup]] = None) -> Iterator[GHom]:
    """Stream of homomorphisms ``G -> P`` with ``P`` a cataloged pi-group.

    Ordered by target order, catalog position, images of A's generators, then
    images of B's generators.  ``budget`` caps the number of candidate image
    pairs examined; exceeding it raises :class:`HomBudgetError` whose
    ``frontier`` is the largest order searched completely.
    """
    targets = target_groups(pi, max_order) if targets is None else list(targets)
    examined = 0
    frontier = 1
    for i, P in enumerate(targets):
        try:
            homs_A = enumerate_base_homs(spec.A, P)
            homs_B = enumerate_base_homs(spec.B, P)
        except HomBudgetError as e:
            raise HomBudgetError(str(e), frontier) from None
        hs = [[fa.apply(h) for h in spec.H.gens] for fa in homs_A]
        ks = [[fb.apply(k) for k in spec.K.gens] for fb in homs_B]
        for fa, hi in zip(homs_A, hs):
            for fb, ki in zip(homs_B, ks):
                examined += 1
                if budget is not None and examined > budget:
                    raise HomBudgetError(f"budget of {budget} candidate homomorphisms spent", frontier)
                if all(P.commute(x, y) for x in hi for y in ki):
                    yield GHom(spec, fa, fb)
        if i + 1 == len(targets) or targets[i + 1].order != P.order:
            frontier = P.order
