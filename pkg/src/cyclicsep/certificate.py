"""Separation certificates: JSON layout and an independent checker.

The checker shares only the text parser with the search code.  Group
axioms, homomorphism conditions and word evaluation are redone here with
plain loops over the Cayley table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from . import dsl

VERSION = 1
_KEYS = ["version", "spec", "pi", "group", "images", "g", "c", "claim"]

STEPS = {
    "i": "Cayley table is a group",
    "ii": "factor homomorphisms are well defined",
    "iii": "images of H and K commute",
    "iv": "g and c evaluate",
    "v": "image of g lies outside the cyclic subgroup generated by the image of c",
}


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    spec: str
    pi: str
    table: tuple
    images_A: tuple
    images_B: tuple
    g: str
    c: str

    @property
    def order(self) -> int:
        return len(self.table)

    def to_dict(self) -> dict:
        return {
            "version": VERSION,
            "spec": self.spec,
            "pi": self.pi,
            "group": {"order": self.order, "table": [list(r) for r in self.table]},
            "images": {"A": list(self.images_A), "B": list(self.images_B)},
            "g": self.g,
            "c": self.c,
            "claim": "separated",
        }

    def to_json(self) -> str:
        d = self.to_dict()
        head = json.dumps(d["spec"])
        rows = ",\n      ".join(json.dumps(r) for r in d["group"]["table"])
        # hand layout: one table row per line, everything else on fixed lines
        return (
            "{\n"
            f'  "version": {d["version"]},\n'
            f'  "spec": {head},\n'
            f'  "pi": {json.dumps(d["pi"])},\n'
            f'  "group": {{\n    "order": {d["group"]["order"]},\n    "table": [\n      {rows}\n    ]\n  }},\n'
            f'  "images": {{"A": {json.dumps(d["images"]["A"])}, "B": {json.dumps(d["images"]["B"])}}},\n'
            f'  "g": {json.dumps(d["g"])},\n'
            f'  "c": {json.dumps(d["c"])},\n'
            f'  "claim": "separated"\n'
            "}\n"
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedCertificate(f"not JSON: {e}") from None
        return cls.from_dict(d)

    @classmethod
    def from_dict(cls, d) -> "Certificate":
        if not isinstance(d, dict) or list(d.keys()) != _KEYS:
            raise MalformedCertificate(f"expected keys {_KEYS} in this order")
        if d["version"] != VERSION:
            raise MalformedCertificate(f"unsupported version {d['version']!r}")
        if d["claim"] != "separated":
            raise MalformedCertificate(f"unknown claim {d['claim']!r}")
        grp, imgs = d["group"], d["images"]
        if not isinstance(grp, dict) or sorted(grp) != ["order", "table"]:
            raise MalformedCertificate("group must have exactly 'order' and 'table'")
        if not isinstance(imgs, dict) or sorted(imgs) != ["A", "B"]:
            raise MalformedCertificate("images must have exactly 'A' and 'B'")
        table = grp["table"]
        if (not isinstance(table, list) or not all(isinstance(r, list) for r in table)
                or not all(isinstance(x, int) and not isinstance(x, bool) for r in table for x in r)):
            raise MalformedCertificate("table must be a list of integer rows")
        if grp["order"] != len(table):
            raise MalformedCertificate("group order does not match the table")
        for key in ("A", "B"):
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in imgs[key]):
                raise MalformedCertificate(f"images of {key} must be integers")
        for key in ("spec", "pi", "g", "c"):
            if not isinstance(d[key], str):
                raise MalformedCertificate(f"{key} must be a string")
        return cls(d["spec"], d["pi"], tuple(tuple(r) for r in table),
                   tuple(imgs["A"]), tuple(imgs["B"]), d["g"], d["c"])


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: Optional[str] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _fail(step: str, message: str) -> Verdict:
    return Verdict(False, step, f"step ({step}) {STEPS[step]}: {message}")


class _Table:
    def __init__(self, table):
        self.t = table
        self.n = len(table)

    def mul(self, a, b):
        return self.t[a][b]

    def inv(self, a):
        return self.t[a].index(0)

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        r = 0
        for _ in range(e % self.order_of(a) if a else 0):
            r = self.t[r][a]
        return r

    def order_of(self, a):
        k, x = 1, a
        while x != 0:
            x = self.t[x][a]
            k += 1
        return k


def _check_table(table) -> Optional[str]:
    n = len(table)
    if n == 0:
        return "empty table"
    if any(len(r) != n for r in table):
        return "table is not square"
    if any(x < 0 or x >= n for r in table for x in r):
        return "entry out of range"
    if list(table[0]) != list(range(n)) or [r[0] for r in table] != list(range(n)):
        return "index 0 is not the identity"
    for r in table:
        if len(set(r)) != n:
            return "a row repeats an element"
    for j in range(n):
        if len({table[i][j] for i in range(n)}) != n:
            return "a column repeats an element"
    for a in range(n):
        ra = table[a]
        for b in range(n):
            rab = table[ra[b]]
            rb = table[b]
            for c in range(n):
                if rab[c] != ra[rb[c]]:
                    return f"({a}*{b})*{c} != {a}*({b}*{c})"
    return None


def _evaluate(P: _Table, factor, images, raw) -> int:
    """Image of a raw factor element under generator images ``images``."""
    r = 0
    if factor.kind == "free":
        for x in raw:
            img = images[abs(x) - 1]
            r = P.mul(r, img if x > 0 else P.inv(img))
        return r
    for img, e in zip(images, raw):
        r = P.mul(r, P.pow(img, e))
    return r


def verify_certificate(cert) -> Verdict:
    """Recheck a certificate from scratch; the verdict names the first failing step."""
    if isinstance(cert, str):
        cert = Certificate.from_json(cert)
    elif isinstance(cert, dict):
        cert = Certificate.from_dict(cert)
    try:
        doc = dsl.parse_spec(cert.spec)
    except dsl.DSLError as e:
        raise MalformedCertificate(f"spec does not parse: {e}") from None
    p = doc.product
    fA, fB = doc.factors[p.A], doc.factors[p.B]

    err = _check_table(cert.table)
    if err:
        return _fail("i", err)
    P = _Table(cert.table)

    for f, imgs in ((fA, cert.images_A), (fB, cert.images_B)):
        if len(imgs) != len(f.letters):
            return _fail("ii", f"{f.name} has {len(f.letters)} generators but {len(imgs)} images")
        if any(x < 0 or x >= P.n for x in imgs):
            return _fail("ii", f"image index out of range for {f.name}")
        if f.kind == "abelian":
            for i in range(len(imgs)):
                for j in range(i + 1, len(imgs)):
                    if P.mul(imgs[i], imgs[j]) != P.mul(imgs[j], imgs[i]):
                        return _fail("ii", f"images of {f.letters[i]} and {f.letters[j]} do not commute")
            for i, m in enumerate(f.torsion):
                x = imgs[f.free_rank + i]
                y = 0
                for _ in range(m):
                    y = P.mul(y, x)
                if y != 0:
                    return _fail("ii", f"image of {f.letters[f.free_rank + i]} does not have order dividing {m}")

    hs = [_evaluate(P, fA, cert.images_A, h) for h in doc.subgroups[p.H].gens]
    ks = [_evaluate(P, fB, cert.images_B, k) for k in doc.subgroups[p.K].gens]
    for i, x in enumerate(hs):
        for j, y in enumerate(ks):
            if P.mul(x, y) != P.mul(y, x):
                return _fail("iii", f"image of generator {i + 1} of {p.H} and generator {j + 1} of {p.K} do not commute")

    values = {}
    for key, text in (("g", cert.g), ("c", cert.c)):
        try:
            letters = dsl.parse_word_raw(doc, text)
        except dsl.DSLError as e:
            return _fail("iv", f"{key} does not parse: {e}")
        r = 0
        for tag, raw in letters:
            f, imgs = (fA, cert.images_A) if tag == "A" else (fB, cert.images_B)
            r = P.mul(r, _evaluate(P, f, imgs, raw))
        values[key] = r

    x, y = values["g"], values["c"]
    powers = {0}
    z = y
    while z != 0:
        powers.add(z)
        z = P.mul(z, y)
    if x in powers:
        return _fail("v", f"image {x} of g is a power of the image {y} of c")
    return Verdict(True, None, "certificate verified")
