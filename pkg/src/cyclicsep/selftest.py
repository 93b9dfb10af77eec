"""Built-in corpus behind ``cyclicsep selftest``: CLI calls with their expected exit codes."""
from __future__ import annotations

import io
import json
import os
import random
import tempfile
from contextlib import redirect_stderr, redirect_stdout

from .commuting_product import GWord, normalize

G22 = """A = free(a)
B = free(b)
H = subgroup(A; a^2)
K = subgroup(B; b^2)
G = commprod(A, H, B, K)
pi = 2
"""

G23 = G22.replace("b^2", "b^3")
G24 = G22.replace("b^2", "b^4")

TORSION = """A = abelian(1, torsion=[3], names=[a, t])
B = free(b)
H = subgroup(A; a)
K = subgroup(B; b)
G = commprod(A, H, B, K)
"""


def corpus():
    """``(label, argv, expected exit code)`` triples."""
    return [
        ("nf of the defining relation", ["nf", "b^2 a^2", G22], 0),
        ("nf of a commutator", ["nf", "a b a^-1 b^-1", G22], 0),
        ("commuting relation holds", ["eq", "a^2 b^2", "b^2 a^2", G22], 0),
        ("commutator is nontrivial", ["eq", "a b a^-1 b^-1", "1", G22], 1),
        ("length of ab", ["len", "a b", G22], 0),
        ("<ab> is isolated", ["isolated", "a b", G22], 0),
        ("<a^3> is not isolated", ["isolated", "a^3", G22], 1),
        ("<(ab)^3> is not isolated", ["isolated", "a b a b a b", G22], 1),
        ("criterion holds for G22", ["criterion", G22], 0),
        ("criterion fails for G23", ["criterion", G23], 1),
        ("criterion fails with 3-torsion", ["criterion", "--pi", "2", TORSION], 1),
        ("criterion holds for G23 over all primes", ["criterion", "--pi", "all", G23], 0),
        ("separate ab from <a>", ["separate", "a b", "a", G22], 0),
        ("separate b^2 from <a^2>", ["separate", "b^2", "a^2", G22], 0),
        ("separate ba from <ab>", ["separate", "b a", "a b", G22], 0),
        ("a is not separable from <a^3>", ["separate", "a", "a^3", G22], 1),
        ("g inside <c> is an input error", ["separate", "a^4", "a^2", G22], 3),
        ("tiny budget is exhausted", ["separate", "--max-order", "1", "a b", "a", G22], 2),
        ("separate in U", ["sep-hk", "a^2 b^-4", "a^2 b^4", G24], 0),
        ("power of c is in the closure", ["sep-hk", "a^4 b^8", "a^2 b^4", G24], 1),
        ("odd root is in the closure", ["sep-hk", "a^2", "a^6", G24], 1),
        ("unknown letter", ["nf", "z", G22], 3),
        ("bad spec", ["nf", "a", "A = free(a"], 3),
    ]


def _run(argv):
    from .cli import main
    buf, err = io.StringIO(), io.StringIO()
    with redirect_stdout(buf), redirect_stderr(err):
        code = main(argv)
    return code, buf.getvalue() + err.getvalue()


def _certificate_cases(tmpdir):
    path = os.path.join(tmpdir, "cert.json")
    code, _ = _run(["separate", "--out", path, "a b", "a", G22])
    out = [("write certificate", code, 0)]
    out.append(("verify certificate", _run(["verify", path])[0], 0))
    with open(path) as fh:
        d = json.load(fh)
    d["group"]["table"][1][1] = d["group"]["table"][1][0]
    bad = os.path.join(tmpdir, "bad.json")
    with open(bad, "w") as fh:
        json.dump(d, fh)
    out.append(("tampered certificate fails", _run(["verify", bad])[0], 1))
    junk = os.path.join(tmpdir, "junk.json")
    with open(junk, "w") as fh:
        fh.write("{not json")
    out.append(("malformed certificate", _run(["verify", junk])[0], 3))
    return out


def _random_word(rng, n):
    return GWord((rng.choice("AB"), (rng.choice([1, -1]),)) for _ in range(n))


def _free_pow(letter: int, e: int):
    return (letter if e > 0 else -letter,) * abs(e)


def _relator_cases(seed: int, count: int = 50):
    from .dsl import parse_spec
    spec = parse_spec(G22).build()
    rng = random.Random(seed)
    bad = 0
    for _ in range(count):
        w = _random_word(rng, rng.randint(0, 12))
        i = rng.randint(0, len(w))
        h, k = 2 * rng.randint(-2, 2), 2 * rng.randint(-2, 2)
        rel = GWord([("A", _free_pow(1, h)), ("B", _free_pow(1, k)),
                     ("A", _free_pow(1, -h)), ("B", _free_pow(1, -k))])
        w2 = GWord(tuple(w[:i]) + tuple(rel) + tuple(w[i:]))
        if normalize(spec, w) != normalize(spec, w2):
            bad += 1
    return [(f"relator insertion, seed {seed}", bad, 0)]


def run_selftest(seed: int = 0, stream=None, as_json: bool = False) -> int:
    results = []
    for label, argv, want in corpus():
        code, _ = _run(list(argv))
        results.append((label, code, want))
    with tempfile.TemporaryDirectory() as d:
        results.extend(_certificate_cases(d))
    results.extend(_relator_cases(seed))
    failures = 0
    for label, got, want in results:
        ok = got == want
        failures += not ok
        if as_json:
            print(json.dumps({"case": label, "got": got, "expected": want, "ok": ok}), file=stream)
        else:
            print(f"{'ok  ' if ok else 'FAIL'} {label} (got {got}, expected {want})", file=stream)
    if not as_json:
        print(f"{len(results) - failures}/{len(results)} cases passed", file=stream)
    return failures
