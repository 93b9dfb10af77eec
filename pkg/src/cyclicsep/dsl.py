"""Text format for group specs and words.

A spec document is a list of declarations, one per line::

    # G_22
    A = free(a)
    B = abelian(1, names=[b])
    H = subgroup(A; a^2)
    K = subgroup(B; (2))
    G = commprod(A, H, B, K)
    pi = 2
    max_order = 16

Words are products of letters such as ``a^3 b^-2 a``; ``1`` is the identity
and ``A(1, 0)`` spells an element of an abelian factor by its coordinates.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .arith import PiSet
from .base_groups import AbelianGroup, FreeGroup, GroupError, free_reduce
from .commuting_product import CommProdSpec, GWord, SpecError, build_spec


class DSLError(ValueError):
    pass


class DSLSyntaxError(DSLError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line, self.col = line, col


class DSLSemanticError(DSLError):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass(frozen=True)
class FactorDecl:
    name: str
    kind: str  # "free" or "abelian"
    letters: tuple
    free_rank: int = 0
    torsion: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SubgroupDecl:
    name: str
    parent: str
    gens: tuple  # raw elements of the parent factor
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProductDecl:
    name: str
    A: str
    H: str
    B: str
    K: str
    line: int = field(default=0, compare=False)


@dataclass
class SpecDocument:
    factors: dict = field(default_factory=dict)
    subgroups: dict = field(default_factory=dict)
    product: Optional[ProductDecl] = None
    pi: Optional[str] = None
    max_order: Optional[int] = None
    order: list = field(default_factory=list)  # declaration names in file order

    def structure(self):
        return (self.order, dict(self.factors), dict(self.subgroups), self.product,
                self.pi, self.max_order)

    def __eq__(self, other):
        return isinstance(other, SpecDocument) and self.structure() == other.structure()

    # -- building -----------------------------------------------------------------

    def factor_group(self, name: str):
        f = self.factors[name]
        if f.kind == "free":
            return FreeGroup(f.letters)
        return AbelianGroup(f.free_rank, f.torsion, f.letters)

    def build(self) -> CommProdSpec:
        p = self.product
        if p is None:
            raise DSLSemanticError("no commprod declaration")
        A, B = self.factor_group(p.A), self.factor_group(p.B)
        Hd, Kd = self.subgroups[p.H], self.subgroups[p.K]
        try:
            spec = build_spec(A, B, Hd.gens, Kd.gens,
                              names={"A": p.A, "B": p.B, "H": p.H, "K": p.K, "G": p.name})
        except (SpecError, GroupError) as e:
            raise DSLSemanticError(str(e), p.line) from None
        return spec

    def pi_set(self, default: str = "2") -> PiSet:
        return PiSet.parse(self.pi if self.pi is not None else default)


# -- tokenizer -----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>-?\d+)|(?P<sym>[()\[\],;=^*]))")


def _tokenize(text: str, line: int):
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise DSLSyntaxError(f"unexpected character {text[col - 1]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind) + 1
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks, line: int, text: str):
        self.toks, self.i, self.line, self.text = toks, 0, line, text

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, len(self.text.rstrip()) + 1)

    def error(self, msg: str):
        raise DSLSyntaxError(msg, self.line, self.peek()[2])

    def take(self, kind: str, value: Optional[str] = None):
        k, v, _ = self.peek()
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            got = v if v is not None else "end of line"
            self.error(f"expected {want!r}, found {got!r}")
        self.i += 1
        return v

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        k, v, _ = self.peek()
        return k == kind and (value is None or v == value)

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def int_list(self, close: str):
        out = []
        if self.at("sym", close):
            return out
        out.append(int(self.take("int")))
        while self.at("sym", ","):
            self.take("sym", ",")
            out.append(int(self.take("int")))
        return out

    def name_list(self, close: str):
        out = [self.take("name")]
        while self.at("sym", ","):
            self.take("sym", ",")
            out.append(self.take("name"))
        return out


# -- words ---------------------------------------------------------------------------

def _word_items(p: _Parser, stop=(",", ")", ";")):
    """Parse a word into ``(letter_or_factor, payload, col)`` items."""
    items = []
    while not p.done() and not (p.at("sym") and p.peek()[1] in stop):
        kind, val, col = p.peek()
        if kind == "sym" and val == "*":
            p.take("sym")
            continue
        if kind == "int":
            if val != "1":
                p.error(f"bare integer {val!r} in a word (only 1 means the identity)")
            p.take("int")
            continue
        if kind == "sym" and val == "(":
            p.take("sym", "(")
            vec = p.int_list(")")
            p.take("sym", ")")
            items.append(("vector", None, tuple(vec), col))
            continue
        if kind != "name":
            p.error(f"unexpected {val!r} in a word")
        p.take("name")
        if p.at("sym", "("):
            p.take("sym", "(")
            vec = p.int_list(")")
            p.take("sym", ")")
            items.append(("vector", val, tuple(vec), col))
            continue
        e = 1
        if p.at("sym", "^"):
            p.take("sym", "^")
            e = int(p.take("int"))
        items.append(("letter", val, e, col))
    return items


def _letter_owner(doc: SpecDocument, factor_names):
    owner = {}
    for fname in factor_names:
        for i, letter in enumerate(doc.factors[fname].letters):
            owner[letter] = (fname, i)
    return owner


def _raw_letters(doc: SpecDocument, items, factor_names, line: int, default_factor=None):
    """Turn word items into ``(factor name, raw element)`` pieces."""
    owner = _letter_owner(doc, factor_names)
    out = []
    for kind, name, payload, col in items:
        if kind == "vector":
            fname = name if name is not None else default_factor
            if fname is None:
                raise DSLSyntaxError("a bare coordinate vector needs a factor prefix, e.g. A(1, 0)", line, col)
            if fname not in factor_names:
                raise DSLSemanticError(f"{fname!r} is not a factor here", line)
            f = doc.factors[fname]
            if f.kind != "abelian":
                raise DSLSemanticError(f"coordinate vectors need an abelian factor, {fname!r} is free", line)
            if len(payload) != len(f.letters):
                raise DSLSemanticError(f"{fname} has {len(f.letters)} coordinates, got {len(payload)}", line)
            out.append((fname, tuple(payload)))
            continue
        if name not in owner:
            raise DSLSemanticError(f"unknown letter {name!r}", line)
        fname, i = owner[name]
        f = doc.factors[fname]
        if f.kind == "free":
            sign = i + 1 if payload > 0 else -(i + 1)
            out.append((fname, (sign,) * abs(payload)))
        else:
            out.append((fname, tuple(payload if j == i else 0 for j in range(len(f.letters)))))
    return out


def _merge_factor(doc: SpecDocument, fname: str, pieces):
    f = doc.factors[fname]
    if f.kind == "free":
        return free_reduce([x for _, e in pieces for x in e])
    v = [0] * len(f.letters)
    for _, e in pieces:
        v = [a + b for a, b in zip(v, e)]
    return tuple(v)


# -- documents -----------------------------------------------------------------------

_RESERVED = {"free", "abelian", "subgroup", "commprod", "torsion", "names", "pi", "max_order", "all"}


def parse_spec(text: str) -> SpecDocument:
    doc = SpecDocument()
    declared: dict[str, int] = {}
    all_letters: dict[str, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        toks = _tokenize(body, lineno)
        p = _Parser(toks, lineno, body)
        name = p.take("name")
        p.take("sym", "=")
        if name == "pi":
            if p.at("name", "all"):
                p.take("name")
                doc.pi = "all"
            else:
                val = p.take("int")
                try:
                    PiSet.parse(val)
                except ValueError as e:
                    raise DSLSemanticError(str(e), lineno) from None
                doc.pi = str(int(val))
        elif name == "max_order":
            doc.max_order = int(p.take("int"))
            if doc.max_order < 1:
                raise DSLSemanticError("max_order must be positive", lineno)
        else:
            if name in _RESERVED:
                raise DSLSemanticError(f"{name!r} is a reserved word", lineno)
            if name in declared:
                raise DSLSemanticError(f"{name!r} already declared on line {declared[name]}", lineno)
            head = p.take("name")
            p.take("sym", "(")
            if head == "free":
                letters = tuple(p.name_list(")"))
                _check_letters(letters, all_letters, name, lineno)
                doc.factors[name] = FactorDecl(name, "free", letters, len(letters), (), lineno)
            elif head == "abelian":
                rank = int(p.take("int"))
                torsion, letters = [], None
                while p.at("sym", ","):
                    p.take("sym", ",")
                    key = p.take("name")
                    p.take("sym", "=")
                    p.take("sym", "[")
                    if key == "torsion":
                        torsion = p.int_list("]")
                    elif key == "names":
                        letters = p.name_list("]")
                    else:
                        p.error(f"unknown option {key!r} (expected torsion or names)")
                    p.take("sym", "]")
                n = rank + len(torsion)
                if letters is None:
                    letters = [f"{name.lower()}{i + 1}" for i in range(n)]
                try:
                    AbelianGroup(rank, torsion, letters)
                except GroupError as e:
                    raise DSLSemanticError(str(e), lineno) from None
                _check_letters(tuple(letters), all_letters, name, lineno)
                doc.factors[name] = FactorDecl(name, "abelian", tuple(letters), rank, tuple(torsion), lineno)
            elif head == "subgroup":
                parent = p.take("name")
                if parent not in doc.factors:
                    raise DSLSemanticError(f"undeclared factor {parent!r}", lineno)
                p.take("sym", ";")
                gens = []
                while not p.at("sym", ")"):
                    items = _word_items(p)
                    pieces = _raw_letters(doc, items, [parent], lineno, default_factor=parent)
                    gens.append(_merge_factor(doc, parent, pieces))
                    if p.at("sym", ","):
                        p.take("sym", ",")
                    elif not p.at("sym", ")"):
                        p.error("expected ',' or ')'")
                G = doc.factor_group(parent)
                gens = tuple(G.element(g) for g in gens)
                doc.subgroups[name] = SubgroupDecl(name, parent, gens, lineno)
            elif head == "commprod":
                args = p.name_list(")")
                if len(args) != 4:
                    raise DSLSemanticError("commprod takes four arguments (A, H, B, K)", lineno)
                A, H, B, K = args
                for a in (A, B):
                    if a not in doc.factors:
                        raise DSLSemanticError(f"undeclared factor {a!r}", lineno)
                for s, parent in ((H, A), (K, B)):
                    if s not in doc.subgroups:
                        raise DSLSemanticError(f"undeclared subgroup {s!r}", lineno)
                    if doc.subgroups[s].parent != parent:
                        raise DSLSemanticError(
                            f"{s} is a subgroup of {doc.subgroups[s].parent}, not of {parent}", lineno)
                if A == B:
                    raise DSLSemanticError("the two factors must be distinct declarations", lineno)
                if doc.product is not None:
                    raise DSLSemanticError(f"second commprod (first on line {doc.product.line})", lineno)
                doc.product = ProductDecl(name, A, H, B, K, lineno)
            else:
                raise DSLSemanticError(f"unknown constructor {head!r}", lineno)
            p.take("sym", ")")
            declared[name] = lineno
            doc.order.append(name)
        if not p.done():
            p.error(f"unexpected {p.peek()[1]!r} after declaration")
    if doc.product is None:
        raise DSLSemanticError("no commprod declaration")
    doc.build()  # scope checks (non-cyclic subgroup of a free factor, ...)
    return doc


def _check_letters(letters, seen, owner, line):
    for letter in letters:
        if letter in _RESERVED:
            raise DSLSemanticError(f"{letter!r} is a reserved word", line)
        if letter in seen:
            raise DSLSemanticError(f"letter {letter!r} already used by {seen[letter][0]} "
                                   f"(line {seen[letter][1]})", line)
        seen[letter] = (owner, line)
    if len(set(letters)) != len(letters):
        raise DSLSemanticError(f"repeated letters in {owner}", line)


def _format_raw(doc: SpecDocument, fname: str, x) -> str:
    return doc.factor_group(fname).format(x)


def serialize(doc: SpecDocument) -> str:
    """Canonical text; ``parse_spec(serialize(doc)) == doc``."""
    lines = []
    for name in doc.order:
        if name in doc.factors:
            f = doc.factors[name]
            if f.kind == "free":
                lines.append(f"{name} = free({', '.join(f.letters)})")
            else:
                opts = f"{f.free_rank}"
                if f.torsion:
                    opts += f", torsion=[{', '.join(map(str, f.torsion))}]"
                opts += f", names=[{', '.join(f.letters)}]"
                lines.append(f"{name} = abelian({opts})")
        elif name in doc.subgroups:
            s = doc.subgroups[name]
            gens = ", ".join(_format_raw(doc, s.parent, g) for g in s.gens)
            lines.append(f"{name} = subgroup({s.parent}; {gens})")
        else:
            p = doc.product
            lines.append(f"{p.name} = commprod({p.A}, {p.H}, {p.B}, {p.K})")
    if doc.pi is not None:
        lines.append(f"pi = {doc.pi}")
    if doc.max_order is not None:
        lines.append(f"max_order = {doc.max_order}")
    return "\n".join(lines) + "\n"


def spec_to_document(spec: CommProdSpec, pi: Optional[PiSet] = None,
                     max_order: Optional[int] = None) -> SpecDocument:
    names = spec.names
    doc = SpecDocument()
    for key, X in (("A", spec.A), ("B", spec.B)):
        n = names.get(key, key)
        if isinstance(X, FreeGroup):
            doc.factors[n] = FactorDecl(n, "free", X.names, X.rank, ())
        else:
            doc.factors[n] = FactorDecl(n, "abelian", X.names, X.free_rank, X.torsion)
        doc.order.append(n)
    for key, parent, S in (("H", "A", spec.H), ("K", "B", spec.K)):
        n = names.get(key, key)
        doc.subgroups[n] = SubgroupDecl(n, names.get(parent, parent), tuple(S.gens))
        doc.order.append(n)
    g = names.get("G", "G")
    doc.product = ProductDecl(g, names.get("A", "A"), names.get("H", "H"),
                              names.get("B", "B"), names.get("K", "K"))
    doc.order.append(g)
    doc.pi = None if pi is None else str(pi)
    doc.max_order = max_order
    return doc


def spec_to_text(spec: CommProdSpec, pi: Optional[PiSet] = None, max_order: Optional[int] = None) -> str:
    return serialize(spec_to_document(spec, pi, max_order))


# -- words against a built spec ------------------------------------------------------

def parse_word(doc: SpecDocument, text: str) -> GWord:
    """Parse a word over the two factors of the product."""
    p_decl = doc.product
    if p_decl is None:
        raise DSLSemanticError("no commprod declaration")
    factors = [p_decl.A, p_decl.B]
    tags = {p_decl.A: "A", p_decl.B: "B"}
    body = text.split("#", 1)[0].strip()
    letters = []
    for ln, line in enumerate(body.splitlines() or [""], 1):
        if not line.strip():
            continue
        p = _Parser(_tokenize(line, ln), ln, line)
        items = _word_items(p, stop=())
        if not p.done():
            p.error(f"unexpected {p.peek()[1]!r}")
        for fname, raw in _raw_letters(doc, items, factors, ln):
            G = doc.factor_group(fname)
            letters.append((tags[fname], G.element(raw)))
    return GWord(letters)


def parse_word_raw(doc: SpecDocument, text: str):
    """Letters of a word as ``(tag, raw element)`` without any group arithmetic.

    Free letters are signed generator indices (``+-(i+1)``); abelian letters are
    unreduced coordinate vectors.
    """
    p_decl = doc.product
    factors = [p_decl.A, p_decl.B]
    tags = {p_decl.A: "A", p_decl.B: "B"}
    letters = []
    for ln, line in enumerate(text.split("#", 1)[0].strip().splitlines(), 1):
        if not line.strip():
            continue
        p = _Parser(_tokenize(line, ln), ln, line)
        items = _word_items(p, stop=())
        if not p.done():
            p.error(f"unexpected {p.peek()[1]!r}")
        letters.extend((tags[f], raw) for f, raw in _raw_letters(doc, items, factors, ln))
    return letters


def format_word(spec: CommProdSpec, w) -> str:
    from .commuting_product import format_word as _fw
    return _fw(spec, w)
