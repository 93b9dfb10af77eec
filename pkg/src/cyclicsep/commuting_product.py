"""The group ``G = <A * B; [H, K] = 1>`` and its canonical forms.

``G`` is the amalgam ``M *_U N`` with ``U = H x K``, ``M = A *_H U`` and
``N = B *_K U``.  A normal form stores the ``U``-part ``(h, k)`` and a
sequence of alternating M- and N-blocks.  An M-block is the right coset
representative of ``U`` in ``M``: an alternating product of nontrivial
coset representatives of ``H`` in ``A`` and nontrivial elements of ``K``,
always starting on the ``A`` side.  N-blocks mirror this with ``B``, ``K``
and ``H``.

Everything is computed by left multiplication, one letter at a time, so
canonicity only rests on the transversals chosen in the factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .arith import lattice_solve
from .base_groups import (AbelianGroup, CyclicSubgroup, FreeGroup, GroupError, UnsupportedShape,
                          cyclic_subgroup, subgroup)


class SpecError(GroupError):
    pass


@dataclass(frozen=True)
class _Side:
    """One vertex amalgam: ``X *_S (S x T)`` with ``S <= X`` and ``T`` from the other factor."""
    kind: str  # "M" or "N"
    tag: str  # factor tag of X
    X: object
    S: object
    Y: object
    T: object


class CommProdSpec:
    """Factors ``A, B`` with subgroups ``H <= A``, ``K <= B`` that commute in ``G``."""

    def __init__(self, A, B, H, K, names: Optional[dict] = None):
        self.A, self.B, self.H, self.K = A, B, H, K
        self.names = dict(names or {"A": "A", "B": "B", "H": "H", "K": "K"})
        self.M = _Side("M", "A", A, H, B, K)
        self.N = _Side("N", "B", B, K, A, H)
        self.identity = GNormalForm(A.identity, B.identity, ())
        self._hdim = len(H.gens)
        self._kdim = len(K.gens)

    def __repr__(self):
        return f"CommProdSpec(A={self.A!r}, B={self.B!r}, H={self.H!r}, K={self.K!r})"

    def factor(self, tag: str):
        return self.A if tag == "A" else self.B

    def side(self, kind: str) -> _Side:
        return self.M if kind == "M" else self.N

    # -- U = H x K in coordinates -----------------------------------------------------

    @property
    def u_dim(self) -> int:
        return self._hdim + self._kdim

    def u_coords(self, h, k) -> tuple[int, ...]:
        ch, ck = self.H.coords(h), self.K.coords(k)
        if ch is None or ck is None:
            raise GroupError("element is not in U")
        return tuple(ch) + tuple(ck)

    def u_from_coords(self, v):
        v = tuple(v)
        return self.H.from_coords(v[:self._hdim]), self.K.from_coords(v[self._hdim:])

    def u_relations(self) -> list[tuple[int, ...]]:
        """Coordinate vectors that are trivial in ``U``."""
        zh, zk = (0,) * self._hdim, (0,) * self._kdim
        rows = [tuple(r) + zk for r in self.H.relation_rows()]
        rows += [zh + tuple(r) for r in self.K.relation_rows()]
        return rows


def build_spec(A, B, H_gens, K_gens, names: Optional[dict] = None) -> CommProdSpec:
    """Validate the factor data and assemble the product description."""
    for X in (A, B):
        if not isinstance(X, (FreeGroup, AbelianGroup)):
            raise SpecError(f"{X!r} is not a supported factor")
    letters_a, letters_b = set(A.names), set(B.names)
    clash = letters_a & letters_b
    if clash:
        raise SpecError(f"letters {sorted(clash)} are shared by both factors")
    try:
        Hg = [A.element(g) for g in H_gens]
    except GroupError as e:
        raise SpecError(f"generator of H is not an element of A: {e}") from None
    try:
        Kg = [B.element(g) for g in K_gens]
    except GroupError as e:
        raise SpecError(f"generator of K is not an element of B: {e}") from None
    try:
        H = subgroup(A, Hg)
        K = subgroup(B, Kg)
    except UnsupportedShape as e:
        raise SpecError(str(e)) from None
    return CommProdSpec(A, B, H, K, names)


# -- words and normal forms --------------------------------------------------------------

class Letter(NamedTuple):
    tag: str  # "A" or "B"
    elem: tuple


class GWord(tuple):
    """Sequence of factor-tagged letters; identity letters are dropped."""

    def __new__(cls, letters: Iterable = ()):
        out = []
        for tag, elem in letters:
            if tag not in ("A", "B"):
                raise GroupError(f"unknown factor tag {tag!r}")
            elem = tuple(elem)
            if any(elem):
                out.append(Letter(tag, elem))
        return super().__new__(cls, out)

    def inverse(self, spec: CommProdSpec) -> "GWord":
        return GWord((t, spec.factor(t).inv(e)) for t, e in reversed(self))

    def __add__(self, other):
        return GWord(tuple(self) + tuple(other))


class Block(NamedTuple):
    kind: str  # "M" or "N"
    syllables: tuple


@dataclass(frozen=True)
class GNormalForm:
    h: tuple
    k: tuple
    blocks: tuple = ()

    def is_identity(self) -> bool:
        return not any(self.h) and not any(self.k) and not self.blocks

    def in_u(self) -> bool:
        return not self.blocks


def _tagged(block_syls) -> tuple:
    # block syllables alternate X, T starting on the X side
    return tuple((i % 2 == 0, s) for i, s in enumerate(block_syls))


def _lmul_x(side: _Side, y, s, syls):
    """``y * (s . syls)`` inside ``X *_S U`` for ``y`` in ``X``."""
    X = side.X
    z = X.mul(y, s)
    if syls and syls[0][0]:
        z = X.mul(z, syls[0][1])
        syls = syls[1:]
    t = side.S.coset_rep(z)
    s2 = X.mul(z, X.inv(t))
    if not X.is_identity(t):
        syls = ((True, t),) + syls
    return s2, syls


def _lmul_t(side: _Side, t0, s, syls):
    """``t0 * (s . syls)`` for ``t0`` in ``T`` (which commutes with ``S``)."""
    Y = side.Y
    if syls and not syls[0][0]:
        t = Y.mul(t0, syls[0][1])
        syls = syls[1:]
    else:
        t = t0
    if not Y.is_identity(t):
        syls = ((False, t),) + syls
    return s, syls


def _lmul_letter(spec: CommProdSpec, nf: GNormalForm, tag: str, y) -> GNormalForm:
    side = spec.M if tag == "A" else spec.N
    blocks = nf.blocks
    if blocks and blocks[0].kind == side.kind:
        first, rest = blocks[0].syllables, blocks[1:]
    else:
        first, rest = (), blocks
    s, t = (nf.h, nf.k) if side.kind == "M" else (nf.k, nf.h)
    syls = _tagged(first)
    if not side.Y.is_identity(t):
        syls = ((False, t),) + syls
    s2, syls2 = _lmul_x(side, y, s, syls)
    t2 = side.Y.identity
    if syls2 and not syls2[0][0]:
        t2 = syls2[0][1]
        syls2 = syls2[1:]
    if syls2:
        rest = (Block(side.kind, tuple(e for _, e in syls2)),) + rest
    if side.kind == "M":
        return GNormalForm(s2, t2, rest)
    return GNormalForm(t2, s2, rest)


def _word_of(nf: GNormalForm) -> GWord:
    letters = [("A", nf.h), ("B", nf.k)]
    for block in nf.blocks:
        tags = ("A", "B") if block.kind == "M" else ("B", "A")
        for i, s in enumerate(block.syllables):
            letters.append((tags[i % 2], s))
    return GWord(letters)


def word_of(spec: CommProdSpec, nf: GNormalForm) -> GWord:
    """A word whose product is ``nf``."""
    return _word_of(nf)


def normalize(spec: CommProdSpec, w) -> GNormalForm:
    """Canonical form of the product of the letters of ``w``."""
    if isinstance(w, GNormalForm):
        return w
    w = GWord([(t, spec.factor(t).element(e)) for t, e in w])
    nf = spec.identity
    for tag, y in reversed(w):
        nf = _lmul_letter(spec, nf, tag, y)
    return nf


def mul(spec: CommProdSpec, a: GNormalForm, b: GNormalForm) -> GNormalForm:
    nf = b
    for tag, y in reversed(_word_of(a)):
        nf = _lmul_letter(spec, nf, tag, y)
    return nf


def inv(spec: CommProdSpec, a: GNormalForm) -> GNormalForm:
    return normalize(spec, _word_of(a).inverse(spec))


def eq(a: GNormalForm, b: GNormalForm) -> bool:
    return a == b


def conjugate(spec: CommProdSpec, a: GNormalForm, x: GNormalForm) -> GNormalForm:
    """``x^-1 a x``."""
    return mul(spec, inv(spec, x), mul(spec, a, x))


def power(spec: CommProdSpec, a: GNormalForm, q: int) -> GNormalForm:
    if q < 0:
        a, q = inv(spec, a), -q
    result, base = spec.identity, a
    while q:
        if q & 1:
            result = mul(spec, result, base)
        q >>= 1
        if q:
            base = mul(spec, base, base)
    return result


def syllable_length(nf: GNormalForm) -> int:
    if nf.blocks:
        return len(nf.blocks)
    return 0 if nf.is_identity() else 1


def cyclically_reduce(spec: CommProdSpec, nf: GNormalForm) -> tuple[GNormalForm, GNormalForm]:
    """``(core, conj)`` with ``nf = conj core conj^-1`` and ``core`` cyclically reduced."""
    conj = spec.identity
    core = nf
    while len(core.blocks) >= 2 and core.blocks[0].kind == core.blocks[-1].kind:
        step = GNormalForm(core.h, core.k, core.blocks[:1])
        core = conjugate(spec, core, step)
        conj = mul(spec, conj, step)
    return core, conj


# -- the vertex groups M and N -----------------------------------------------------------

@dataclass(frozen=True)
class LevelForm:
    """Element ``s . syllables`` of ``M`` (or ``N``); syllables carry an is-X flag."""
    kind: str
    s: tuple
    syllables: tuple = ()

    def length(self) -> int:
        return len(self.syllables)


def to_level(spec: CommProdSpec, nf: GNormalForm, kind: str) -> Optional[LevelForm]:
    """View ``nf`` inside ``M`` or ``N``; ``None`` if it lies outside."""
    if len(nf.blocks) > 1 or (nf.blocks and nf.blocks[0].kind != kind):
        return None
    side = spec.side(kind)
    s, t = (nf.h, nf.k) if kind == "M" else (nf.k, nf.h)
    syls = _tagged(nf.blocks[0].syllables) if nf.blocks else ()
    if not side.Y.is_identity(t):
        syls = ((False, t),) + syls
    return LevelForm(kind, s, syls)


def from_level(spec: CommProdSpec, lf: LevelForm) -> GNormalForm:
    side = spec.side(lf.kind)
    syls = lf.syllables
    t = side.Y.identity
    if syls and not syls[0][0]:
        t, syls = syls[0][1], syls[1:]
    blocks = (Block(lf.kind, tuple(e for _, e in syls)),) if syls else ()
    if lf.kind == "M":
        return GNormalForm(lf.s, t, blocks)
    return GNormalForm(t, lf.s, blocks)


def _level_letters(lf: LevelForm):
    out = [(True, lf.s)]
    out.extend(lf.syllables)
    return out


def level_mul(spec: CommProdSpec, a: LevelForm, b: LevelForm) -> LevelForm:
    side = spec.side(a.kind)
    s, syls = b.s, b.syllables
    for is_x, y in reversed(_level_letters(a)):
        if is_x:
            if not side.X.is_identity(y):
                s, syls = _lmul_x(side, y, s, syls)
        else:
            s, syls = _lmul_t(side, y, s, syls)
    return LevelForm(a.kind, s, syls)


def level_inv(spec: CommProdSpec, a: LevelForm) -> LevelForm:
    side = spec.side(a.kind)
    ident = LevelForm(a.kind, side.X.identity, ())
    out = ident
    for is_x, y in _level_letters(a):
        G = side.X if is_x else side.Y
        piece = _level_from_letter(spec, a.kind, is_x, G.inv(y))
        out = level_mul(spec, piece, out)
    return out


def _level_from_letter(spec, kind, is_x, y) -> LevelForm:
    side = spec.side(kind)
    ident = side.X.identity
    if is_x:
        s, syls = _lmul_x(side, y, ident, ())
    else:
        s, syls = _lmul_t(side, y, ident, ())
    return LevelForm(kind, s, syls)


def level_power(spec: CommProdSpec, a: LevelForm, q: int) -> LevelForm:
    if q < 0:
        a, q = level_inv(spec, a), -q
    side = spec.side(a.kind)
    result, base = LevelForm(a.kind, side.X.identity, ()), a
    while q:
        if q & 1:
            result = level_mul(spec, result, base)
        q >>= 1
        if q:
            base = level_mul(spec, base, base)
    return result


def level_cyclically_reduce(spec: CommProdSpec, lf: LevelForm) -> tuple[LevelForm, LevelForm]:
    """``(core, conj)`` inside the vertex group with ``lf = conj core conj^-1``."""
    side = spec.side(lf.kind)
    conj = LevelForm(lf.kind, side.X.identity, ())
    core = lf
    while len(core.syllables) >= 2 and core.syllables[0][0] == core.syllables[-1][0]:
        step = LevelForm(lf.kind, core.s, core.syllables[:1])
        core = level_mul(spec, level_inv(spec, step), level_mul(spec, core, step))
        conj = level_mul(spec, conj, step)
    return core, conj


# -- where an element lives up to conjugacy ----------------------------------------------

class Location(NamedTuple):
    """``nf = conj core conj^-1`` with ``core`` in the smallest natural piece.

    kind: "identity", "G" (cyclically reduced of length >= 2), "M"/"N"
    (inside a vertex group, not conjugate into a factor or U there),
    "A"/"B" (inside a factor, outside the amalgamated subgroup) or "U".
    """
    kind: str
    core: GNormalForm
    conj: GNormalForm
    level: Optional[LevelForm] = None


def locate(spec: CommProdSpec, nf: GNormalForm) -> Location:
    if nf.is_identity():
        return Location("identity", nf, spec.identity)
    core, conj = cyclically_reduce(spec, nf)
    if len(core.blocks) >= 2:
        return Location("G", core, conj)
    kind = core.blocks[0].kind if core.blocks else "M"
    lf = to_level(spec, core, kind)
    lcore, lconj = level_cyclically_reduce(spec, lf)
    conj = mul(spec, conj, from_level(spec, lconj))
    core = from_level(spec, lcore)
    if lcore.length() >= 2:
        return Location(kind, core, conj, lcore)
    if lcore.length() == 1 and lcore.syllables[0][0]:
        return Location("A" if kind == "M" else "B", core, conj, lcore)
    return Location("U", core, conj, lcore)


def factor_element(spec: CommProdSpec, nf: GNormalForm, tag: str):
    """The element of factor ``tag`` equal to ``nf``, or ``None``."""
    kind = "M" if tag == "A" else "N"
    lf = to_level(spec, nf, kind)
    if lf is None:
        return None
    side = spec.side(kind)
    if not lf.syllables:
        return lf.s
    if len(lf.syllables) == 1 and lf.syllables[0][0]:
        return side.X.mul(lf.s, lf.syllables[0][1])
    return None


def embed(spec: CommProdSpec, tag: str, x) -> GNormalForm:
    return normalize(spec, GWord([(tag, x)]))


def cyclic_membership(spec: CommProdSpec, g: GNormalForm, c: GNormalForm) -> Optional[int]:
    """Some ``e`` with ``g = c^e``, or ``None``."""
    if c.is_identity():
        return 0 if g.is_identity() else None
    loc = locate(spec, c)
    g2 = conjugate(spec, g, loc.conj)
    core = loc.core
    candidates: list[int] = []
    if loc.kind == "G":
        L, Lg = len(core.blocks), syllable_length(g2)
        if g2.is_identity():
            candidates = [0]
        elif len(g2.blocks) == Lg and Lg % L == 0:
            candidates = [Lg // L, -(Lg // L)]
    elif loc.kind in ("M", "N"):
        lg = to_level(spec, g2, loc.kind)
        if lg is not None:
            L, Lg = loc.level.length(), lg.length()
            if Lg % L == 0:
                candidates = [Lg // L, -(Lg // L)] if Lg else [0]
    elif loc.kind in ("A", "B"):
        tag = loc.kind
        X = spec.factor(tag)
        x, y = factor_element(spec, core, tag), factor_element(spec, g2, tag)
        if y is not None:
            e = cyclic_subgroup(X, x).membership(y)
            if e is not None:
                candidates = [e if isinstance(e, int) else e[0]]
    else:  # U
        if g2.in_u():
            cv = spec.u_coords(core.h, core.k)
            gv = spec.u_coords(g2.h, g2.k)
            lam = lattice_solve([cv] + spec.u_relations(), gv)
            if lam is not None:
                candidates = [lam[0]]
    for e in candidates:
        if power(spec, core, e) == g2:
            return e
    return None


# -- text --------------------------------------------------------------------------------

def format_word(spec: CommProdSpec, w) -> str:
    if isinstance(w, GNormalForm):
        w = _word_of(w)
    parts = [spec.factor(t).format(e) for t, e in w]
    return " ".join(parts) if parts else "1"


def format_nf(spec: CommProdSpec, nf: GNormalForm) -> str:
    """Text of ``nf`` as a word; parsing and normalizing it gives ``nf`` back."""
    return format_word(spec, nf)
