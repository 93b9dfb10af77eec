"""Isolation tests, the residuality criterion, and separation search for cyclic subgroups of ``G``.

A cyclic subgroup ``<c>`` can only be separated by finite pi-quotients if it
is closed under roots of orders coprime to pi.  ``isolation_status`` looks
for such a root; ``separate`` then searches the quotient stream for a
homomorphism that keeps ``g`` out of the image of ``<c>`` and returns it as a
checked certificate.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence, Union

from .arith import PiSet, factorize, lattice_basis, lattice_contains, lattice_solve, left_kernel, saturate
from .base_groups import (AbelianGroup, CyclicSubgroup, FreeGroup, ball, cyclic_subgroup, free_cyclic_reduce,
                          free_inverse, is_isolated_subgroup_base, isolation_witness_base, isolator_cyclic_base,
                          pi_prime_torsion_free, primitive_root_free)
from .certificate import Certificate, verify_certificate
from .commuting_product import (CommProdSpec, GNormalForm, GWord, LevelForm, conjugate, cyclic_membership, embed,
                                factor_element, format_word, from_level, level_mul, level_power, locate, mul,
                                normalize, power)
from .dsl import spec_to_text
from .finite_groups import FiniteGroup
from .quotients import BaseHom, GHom, HomBudgetError, enumerate_base_homs, enumerate_G_quotients, target_groups


@dataclass(frozen=True)
class IsolationBudget:
    max_exponent: int = 6  # powers c^e searched for roots
    twist_radius: int = 2  # coordinate radius of the twist elements
    max_candidates: int = 20000


@dataclass(frozen=True)
class Isolated:
    exact: bool = True
    note: str = ""


@dataclass(frozen=True)
class NotIsolated:
    x: GNormalForm
    q: int
    note: str = ""


@dataclass(frozen=True)
class Unknown:
    note: str


IsolationStatus = Union[Isolated, NotIsolated, Unknown]


class _Budget(Exception):
    pass


def _reduce_to_prime(spec, y: GNormalForm, m: int, c: GNormalForm):
    """From ``y`` outside ``<c>`` with ``y^m`` inside, get ``(x, p)`` with ``p`` prime."""
    for p in factorize(m):
        yp = power(spec, y, p)
        if cyclic_membership(spec, yp, c) is not None:
            return y, p
        y = yp
    raise AssertionError("root exponent does not land in the subgroup")


def _torsion_witness(spec: CommProdSpec, c: GNormalForm, pi: PiSet):
    """An element of prime order outside pi that avoids ``<c>``, if a factor has one."""
    for tag, other in (("A", "B"), ("B", "A")):
        X = spec.factor(tag)
        if not isinstance(X, AbelianGroup):
            continue
        for i, m in enumerate(X.torsion):
            for p in sorted(set(factorize(m))):
                if not pi.complement_contains(p):
                    continue
                v = [0] * X.n
                v[X.free_rank + i] = m // p
                t = embed(spec, tag, X.element(v))
                Y = spec.factor(other)
                cands = [t] + [conjugate(spec, t, embed(spec, other, Y.generator(j))) for j in range(Y.ngens)]
                for x in cands:
                    if cyclic_membership(spec, x, c) is None:
                        return x, p
    return None


def _conjugate_into_root(A: FreeGroup, a, r):
    """``(z, j)`` with ``z^-1 a z = r^j`` in the free group, or ``None``."""
    dr, vr = free_cyclic_reduce(r)
    da, va = free_cyclic_reduce(a)
    for i in range(len(va)):
        rot = va[i:] + va[:i]
        root, m = primitive_root_free(rot)
        if root == vr:
            j = m
        elif root == free_inverse(vr):
            j = -m
        else:
            continue
        z = A.mul(A.mul(da, va[:i]), free_inverse(dr))
        return z, j
    return None


def _power_in_subgroup(X, S, x) -> int:
    """Least ``d > 0`` with ``x^d`` in ``S`` (0 when no positive power lies in ``S``)."""
    if isinstance(S, CyclicSubgroup):
        if S.is_trivial():
            return 0
        r, m = primitive_root_free(x)
        if r not in (S.root, free_inverse(S.root)):
            return 0
        return S.exp // gcd(S.exp, m)
    rows = [tuple(x)] + list(S.basis)
    ds = [abs(v[0]) for v in left_kernel(rows) if v[0]]
    d = 0
    for e in ds:
        d = gcd(d, e)
    return d


def _lattice_isolation(spec: CommProdSpec, core: GNormalForm, pi: PiSet):
    """Roots inside ``U`` of ``<core>``, via saturation of its coordinate lattice."""
    rel = spec.u_relations()
    v = spec.u_coords(core.h, core.k)
    L = lattice_basis([v] + rel, spec.u_dim)
    sat = saturate([v] + rel, spec.u_dim, pi)
    for b in sat:
        if not lattice_contains(L, b):
            m = 1
            while not lattice_contains(L, [m * x for x in b]):
                m += 1
            h, k = spec.u_from_coords(b)
            y = GNormalForm(h, k, ())
            return _reduce_to_prime(spec, y, m, core)
    return None


def _factor_root_check(spec: CommProdSpec, tag: str, x_elem, core: GNormalForm, pi: PiSet):
    """Roots in a factor of the element ``x_elem`` (a power of ``core`` lying in that factor)."""
    X = spec.factor(tag)
    if X.is_identity(x_elem):
        return None
    iso = isolator_cyclic_base(X, x_elem, pi)
    C = cyclic_subgroup(X, x_elem)
    for y in iso.gens:
        ynf = embed(spec, tag, y)
        if cyclic_membership(spec, ynf, core) is not None:
            continue
        m = 1
        while not C.contains(X.pow(y, m)):
            m += 1
        return _reduce_to_prime(spec, ynf, m, core)
    return None


def _order_of(X, x) -> int:
    if isinstance(X, FreeGroup):
        return 1 if not x else 0
    return X.order(x)


def _u_status(spec: CommProdSpec, core: GNormalForm, pi: PiSet):
    wit = _lattice_isolation(spec, core, pi)
    if wit:
        return wit, True
    exact = True
    # powers of core inside H (resp. K) may acquire roots in A (resp. B)
    ok = _order_of(spec.B, core.k)
    if ok:
        exact = False
        wit = _factor_root_check(spec, "A", spec.A.pow(core.h, ok), core, pi)
        if wit:
            return wit, False
    oh = _order_of(spec.A, core.h)
    if oh:
        exact = False
        wit = _factor_root_check(spec, "B", spec.B.pow(core.k, oh), core, pi)
        if wit:
            return wit, False
    return None, exact


def _solved_twist(spec, R: GNormalForm, q: int, target: GNormalForm):
    """Left twist ``t`` in U with ``(t R)^q`` matching ``target``, if the U-part is affine in ``t``.

    Probes ``t = 0`` and each unit vector, keeps the directions that leave the
    blocks of the power unchanged, and solves over the integers modulo the
    relations of U.  The answer is only a candidate.
    """
    d = spec.u_dim

    def probe(v):
        y = power(spec, mul(spec, GNormalForm(*spec.u_from_coords(v), ()), R), q)
        return spec.u_coords(y.h, y.k) if y.blocks == target.blocks else None

    v0 = probe((0,) * d)
    if v0 is None:
        return None
    dirs, cols = [], []
    for i in range(d):
        vi = probe(tuple(int(j == i) for j in range(d)))
        if vi is not None:
            dirs.append(i)
            cols.append(tuple(a - b for a, b in zip(vi, v0)))
    goal = tuple(a - b for a, b in zip(spec.u_coords(target.h, target.k), v0))
    lam = lattice_solve(cols + spec.u_relations(), goal) if cols else None
    if lam is None:
        return None
    t = [0] * d
    for i, c in zip(dirs, lam):
        t[i] = c
    return spec.u_from_coords(t)


def _harvested_twists(spec, target: GNormalForm, limit: int = 8):
    """U elements seen in ``target``: the U-part and its interior T-syllables.

    A root's U-part that cannot pass a block boundary stays behind as a
    T-syllable (an H element inside N-blocks, a K element inside M-blocks).
    """
    hs, ks = [spec.A.identity, target.h], [spec.B.identity, target.k]
    for b in target.blocks:
        for i, y in enumerate(b.syllables):
            if i % 2:
                (ks if b.kind == "M" else hs).append(y)
    hs, ks = list(dict.fromkeys(hs))[:limit], list(dict.fromkeys(ks))[:limit]
    return [(h, k) for h in hs for k in ks]


def _root_candidates(spec, R: GNormalForm, q: int, target: GNormalForm, twists):
    """Roots ``t R`` to try: the solved twist, harvested twists, then the ball."""
    seen = set()
    t = _solved_twist(spec, R, q, target)
    for h, k in ([t] if t is not None else []) + _harvested_twists(spec, target) + twists:
        if (h, k) in seen:
            continue
        seen.add((h, k))
        yield mul(spec, GNormalForm(h, k, ()), R)


def _hyperbolic_roots(spec: CommProdSpec, loc, pi: PiSet, budget: IsolationBudget):
    # A root x of c^e is t R with R the last l syllables of c^e: normal forms
    # are built from the right, so the reps of x survive intact, and t in U
    # carries the U-part of x.
    core = loc.core
    count = 0
    twists = [spec.u_from_coords(w) for w in ball(spec.u_dim, budget.twist_radius)]
    level = loc.kind != "G"
    if level:
        lcore: LevelForm = loc.level
        n = lcore.length()
        ident = spec.side(loc.kind).X.identity
    else:
        n = len(core.blocks)
    for e in range(1, budget.max_exponent + 1):
        if level:
            Le = level_power(spec, lcore, e)
            Ce = from_level(spec, Le)
        else:
            Ce = power(spec, core, e)
        for q in sorted(set(factorize(e * n))):
            if not pi.complement_contains(q):
                continue
            l = e * n // q
            if l < 2 or l % 2:
                continue
            if level:
                R = from_level(spec, LevelForm(loc.kind, ident, Le.syllables[-l:]))
            else:
                R = GNormalForm(spec.A.identity, spec.B.identity, Ce.blocks[-l:])
            for x in _root_candidates(spec, R, q, Ce, twists):
                count += 1
                if count > budget.max_candidates:
                    raise _Budget()
                if power(spec, x, q) == Ce and cyclic_membership(spec, x, core) is None:
                    return x, q
    return None


def isolation_status(spec: CommProdSpec, c, pi: PiSet, budget: Optional[IsolationBudget] = None) -> IsolationStatus:
    """Is ``<c>`` closed under roots whose order is coprime to pi?"""
    budget = budget or IsolationBudget()
    c = normalize(spec, c)
    if c.is_identity():
        raise ValueError("isolation_status needs a nontrivial element")
    if pi.is_all:
        return Isolated(True, "no primes outside pi")
    tw = _torsion_witness(spec, c, pi)
    if tw:
        return _finish(spec, c, tw, "torsion of order coprime to pi")
    loc = locate(spec, c)
    wit, exact, note = None, True, ""
    if loc.kind in ("G", "M", "N"):
        try:
            wit = _hyperbolic_roots(spec, loc, pi, budget)
        except _Budget:
            return Unknown(f"root search budget of {budget.max_candidates} candidates spent")
        exact = False
        note = (f"bounded root search: exponents up to {budget.max_exponent}, "
                f"twist radius {budget.twist_radius}")
    elif loc.kind in ("A", "B"):
        tag = loc.kind
        X = spec.factor(tag)
        S = spec.H if tag == "A" else spec.K
        x = factor_element(spec, loc.core, tag)
        conj = loc.conj
        if isinstance(X, FreeGroup) and not S.is_trivial():
            hit = _conjugate_into_root(X, x, S.root)
            if hit is not None:
                z, j = hit
                conj = mul(spec, conj, embed(spec, tag, z))
                x = X.pow(S.root, j)
        core = embed(spec, tag, x)
        if S.contains(x):
            wit, exact = _u_status(spec, core, pi)
            note = "element conjugates into U"
        else:
            bw = isolation_witness_base(X, cyclic_subgroup(X, x), pi)
            if bw is not None:
                wit = (embed(spec, tag, bw[0]), bw[1])
            else:
                d = _power_in_subgroup(X, S, x)
                if d:
                    exact = False
                    note = "a power lies in the amalgamated subgroup; roots checked in U and the factors"
                    ucore = embed(spec, tag, X.pow(x, d))
                    wit, _ = _u_status(spec, ucore, pi)
                    if wit and cyclic_membership(spec, wit[0], core) is not None:
                        wit = None
        loc = loc._replace(core=core, conj=conj)
    else:  # U
        wit, exact = _u_status(spec, loc.core, pi)
        note = "element conjugates into U"
    if wit is not None:
        x, q = wit
        return _finish(spec, c, (conjugate(spec, x, _inverse(spec, loc.conj)), q), note)
    return Isolated(exact, note)


def _inverse(spec, x):
    from .commuting_product import inv
    return inv(spec, x)


def _finish(spec, c, wit, note):
    x, q = wit
    assert cyclic_membership(spec, x, c) is None, "root witness already lies in the subgroup"
    assert cyclic_membership(spec, power(spec, x, q), c) is not None, "root witness power escapes"
    return NotIsolated(x, q, note)


# -- the residuality criterion ---------------------------------------------------------

@dataclass
class CriterionReport:
    A_residual: bool
    B_residual: bool
    H_separable: bool
    K_separable: bool
    G_residual: bool
    delta_A_empty: bool
    delta_B_empty: bool
    lambda_empty: bool
    applied_theorem: str
    diagnosis: list = field(default_factory=list)
    search_class: str = "p-groups"

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "A_residual", "B_residual", "H_separable", "K_separable", "G_residual",
            "delta_A_empty", "delta_B_empty", "lambda_empty", "applied_theorem", "diagnosis", "search_class")}


def evaluate_criterion(spec: CommProdSpec, pi: PiSet) -> CriterionReport:
    """Residual pi-finiteness of ``G`` from conditions on the factors.

    ``G`` is residually a finite pi-group exactly when both factors are and
    ``H``, ``K`` are separable in their factors; for free and f.g. abelian
    factors these reduce to torsion and isolation tests.
    """
    names = spec.names
    diag = []
    a_res = pi_prime_torsion_free(spec.A, pi)
    b_res = pi_prime_torsion_free(spec.B, pi)
    for ok, X, key in ((a_res, spec.A, "A"), (b_res, spec.B, "B")):
        if not ok:
            bad = [m for m in X.torsion if not pi.is_pi_number(m)]
            diag.append(f"{names.get(key, key)} has torsion of order {bad} not a {pi}-number "
                        f"(torsion coprime to pi kills residuality)")
    h_sep = is_isolated_subgroup_base(spec.A, spec.H, pi)
    k_sep = is_isolated_subgroup_base(spec.B, spec.K, pi)
    for ok, X, S, key, fkey in ((h_sep, spec.A, spec.H, "H", "A"), (k_sep, spec.B, spec.K, "K", "B")):
        if not ok:
            w = isolation_witness_base(X, S, pi)
            diag.append(f"{names.get(key, key)} is not isolated in {names.get(fkey, fkey)}: "
                        f"{X.format(w[0])} lies outside but its {w[1]}-th power lies inside")
    g_res = a_res and b_res and h_sep and k_sep
    kinds = {type(spec.A), type(spec.B)}
    if kinds == {FreeGroup}:
        tag = "free-factors"
    elif kinds == {AbelianGroup}:
        tag = "abelian-factors"
    else:
        tag = "mixed-factors"
    # isolated cyclic subgroups of free and f.g. abelian groups are always separable
    delta = True
    lam = a_res and b_res and h_sep and k_sep
    if not lam:
        diag.append("emptiness of the obstruction family in HK is not guaranteed")
    return CriterionReport(a_res, b_res, h_sep, k_sep, g_res, delta, delta, lam, tag, diag)


# -- separation search -----------------------------------------------------------------

@dataclass(frozen=True)
class SeparationFound:
    certificate: Certificate
    hom: GHom


@dataclass(frozen=True)
class NotSeparable:
    reason: str
    witness: Optional[NotIsolated] = None


@dataclass(frozen=True)
class BudgetExhausted:
    frontier: int
    examined: int
    note: str = ""


class CriterionFailure(ValueError):
    def __init__(self, report: CriterionReport):
        super().__init__("; ".join(report.diagnosis) or "G is not residually a finite pi-group")
        self.report = report


class InSubgroup(ValueError):
    pass


def _cyclic_image(P: FiniteGroup, y: int) -> set:
    out = {0}
    z = y
    while z != 0:
        out.add(z)
        z = P.table[z][y]
    return out


def _make_certificate(spec, pi, psi: GHom, g_text: str, c_text: str) -> Certificate:
    return Certificate(spec_to_text(spec), str(pi), psi.target.table,
                       tuple(psi.phi_A.images), tuple(psi.phi_B.images), g_text, c_text)


def _scan_target(args):
    spec, pi, P, g, c = args
    for psi in enumerate_G_quotients(spec, pi, P.order, targets=[P]):
        if psi.apply(g) not in _cyclic_image(P, psi.apply(c)):
            return psi.phi_A.images, psi.phi_B.images
    return None


def separate(spec: CommProdSpec, g, c, pi: PiSet, max_order: int = 16,
             budget: Optional[int] = None, jobs: int = 1,
             isolation_budget: Optional[IsolationBudget] = None):
    """Find the first quotient in enumeration order keeping ``g`` out of ``<c>``.

    Returns :class:`SeparationFound`, :class:`NotSeparable` (only with a
    verified obstruction) or :class:`BudgetExhausted`.
    """
    report = evaluate_criterion(spec, pi)
    if not report.G_residual:
        raise CriterionFailure(report)
    gw = g if isinstance(g, (GWord, GNormalForm)) else GWord(g)
    cw = c if isinstance(c, (GWord, GNormalForm)) else GWord(c)
    gn, cn = normalize(spec, gw), normalize(spec, cw)
    e = cyclic_membership(spec, gn, cn)
    if e is not None:
        raise InSubgroup(f"g = c^{e} lies in the cyclic subgroup")
    if not cn.is_identity():
        status = isolation_status(spec, cn, pi, isolation_budget)
        if isinstance(status, NotIsolated):
            return NotSeparable(f"<c> is not isolated: ({format_word(spec, status.x)})^{status.q} lies in <c>",
                                status)
    if cn.in_u() and gn.in_u():
        hk = separate_in_HK(spec, gn, cn, pi, max_order)
        if isinstance(hk, InClosure):
            return NotSeparable("g lies in the closure of <c> inside U")
    g_text = format_word(spec, gw)
    c_text = format_word(spec, cw)
    targets = target_groups(pi, max_order)
    examined = 0
    frontier = 1
    if jobs > 1 and budget is None:
        found = _parallel_scan(spec, pi, targets, gn, cn, jobs)
        if found is not None:
            P, ia, ib = found
            psi = GHom(spec, BaseHom(spec.A, P, ia), BaseHom(spec.B, P, ib))
            return _certify(spec, pi, psi, g_text, c_text)
        return BudgetExhausted(targets[-1].order if targets else 1, -1, "search space exhausted")
    try:
        for psi in enumerate_G_quotients(spec, pi, max_order, budget=budget, targets=targets):
            examined += 1
            P = psi.target
            frontier = P.order
            if psi.apply(gn) not in _cyclic_image(P, psi.apply(cn)):
                return _certify(spec, pi, psi, g_text, c_text)
    except HomBudgetError as err:
        return BudgetExhausted(err.frontier, examined, str(err))
    return BudgetExhausted(targets[-1].order if targets else 1, examined,
                           f"no separating quotient of order <= {max_order}")


def _certify(spec, pi, psi, g_text, c_text) -> SeparationFound:
    cert = _make_certificate(spec, pi, psi, g_text, c_text)
    verdict = verify_certificate(cert)
    if not verdict:
        raise AssertionError(f"search produced a certificate that fails verification: {verdict.message}")
    return SeparationFound(cert, psi)


def _parallel_scan(spec, pi, targets, g, c, jobs):
    # one task per target group; the first target (in order) with a hit wins
    jobs = min(jobs, os.cpu_count() or 1, len(targets)) or 1
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        results = list(ex.map(_scan_target, [(spec, pi, P, g, c) for P in targets]))
    for P, r in zip(targets, results):
        if r is not None:
            return P, r[0], r[1]
    return None


# -- the exact decision inside U --------------------------------------------------------

@dataclass(frozen=True)
class InClosure:
    note: str = ""


@dataclass(frozen=True)
class HKWitness:
    phi_A: BaseHom
    phi_B: BaseHom


def u_closure_contains(spec: CommProdSpec, g: GNormalForm, c: GNormalForm, pi: PiSet) -> bool:
    """Is ``g`` in the set of elements of ``U`` with a power coprime to pi inside ``<c>``?"""
    rel = spec.u_relations()
    cv, gv = spec.u_coords(c.h, c.k), spec.u_coords(g.h, g.k)
    sat = saturate([cv] + rel, spec.u_dim, pi)
    return lattice_contains(sat, gv) if sat else not any(gv)


def _pair_image_subgroup(P1, P2, x):
    out = {(0, 0)}
    z = x
    while z != (0, 0):
        out.add(z)
        z = (P1.table[z[0]][x[0]], P2.table[z[1]][x[1]])
    return out


def hk_separates(phi_A: BaseHom, phi_B: BaseHom, g: GNormalForm, c: GNormalForm) -> bool:
    P1, P2 = phi_A.target, phi_B.target
    gi = (phi_A.apply(g.h), phi_B.apply(g.k))
    ci = (phi_A.apply(c.h), phi_B.apply(c.k))
    return gi not in _pair_image_subgroup(P1, P2, ci)


def separate_in_HK(spec: CommProdSpec, g, c, pi: PiSet, max_order: int = 64):
    """Separate ``g`` from ``<c>`` inside ``U`` using kernels in the two factors.

    Returns :class:`InClosure` when ``g`` lies in the root closure of
    ``<c>`` in ``U`` (no factor kernels can separate it), otherwise the first
    pair of factor homomorphisms that does.
    """
    g, c = normalize(spec, g), normalize(spec, c)
    if not (g.in_u() and c.in_u()):
        raise ValueError("separate_in_HK needs g and c in U = H x K")
    if u_closure_contains(spec, g, c, pi):
        return InClosure("g has a power coprime to pi inside <c>")
    targets = target_groups(pi, max_order)
    index = {id(P): i for i, P in enumerate(targets)}
    pairs = [(P1, P2) for P1 in targets for P2 in targets]
    pairs.sort(key=lambda t: (max(t[0].order, t[1].order), index[id(t[0])], index[id(t[1])]))
    for P1, P2 in pairs:
        for fa in enumerate_base_homs(spec.A, P1):
            for fb in enumerate_base_homs(spec.B, P2):
                if hk_separates(fa, fb, g, c):
                    return HKWitness(fa, fb)
    return BudgetExhausted(targets[-1].order if targets else 1, -1,
                           f"no factor homomorphism pair of order <= {max_order} separates")
