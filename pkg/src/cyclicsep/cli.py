"""Command line interface.

Every command takes its words first and the group spec file last; each
argument is a file path or literal text.  Exit codes: 0 success / true /
certificate found, 1 false / refuted with a witness, 2 budget exhausted,
3 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .arith import PiSet
from .base_groups import GroupError
from .certificate import MalformedCertificate, verify_certificate
from .commuting_product import (format_nf, normalize, syllable_length)
from .dsl import DSLError, parse_spec, parse_word
from .separability import (BudgetExhausted, CriterionFailure, HKWitness, InClosure, InSubgroup, Isolated,
                           NotIsolated, NotSeparable, SeparationFound, evaluate_criterion,
                           isolation_status, separate, separate_in_HK)

EXIT_OK, EXIT_FALSE, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg) as fh:
            return fh.read()
    return arg


def _load(args):
    try:
        doc = parse_spec(_read(args.spec))
        spec = doc.build()
    except (DSLError, GroupError, OSError) as e:
        raise InputError(f"spec: {e}") from None
    return doc, spec


def _word(doc, text):
    try:
        return parse_word(doc, _read(text))
    except (DSLError, GroupError) as e:
        raise InputError(f"word {text!r}: {e}") from None


def _pi(args, doc) -> PiSet:
    try:
        if args.pi is not None:
            return PiSet.parse(args.pi)
        return doc.pi_set()
    except ValueError as e:
        raise InputError(str(e)) from None


def _max_order(args, doc) -> int:
    if args.max_order is not None:
        return args.max_order
    return doc.max_order if doc.max_order is not None else 16


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Out:
    def __init__(self, args, stream=None):
        self.json = getattr(args, "json", False)
        self.stream = stream or sys.stdout

    def emit(self, text: str, data: dict):
        if self.json:
            print(json.dumps(data, sort_keys=False), file=self.stream)
        else:
            print(text, file=self.stream)


def cmd_nf(args, out):
    doc, spec = _load(args)
    nf = normalize(spec, _word(doc, args.word))
    blocks = [{"kind": b.kind, "syllables": [list(s) for s in b.syllables]} for b in nf.blocks]
    out.emit(format_nf(spec, nf), {"nf": format_nf(spec, nf), "h": list(nf.h), "k": list(nf.k),
                                   "blocks": blocks, "length": syllable_length(nf)})
    return EXIT_OK


def cmd_eq(args, out):
    doc, spec = _load(args)
    a = normalize(spec, _word(doc, args.word1))
    b = normalize(spec, _word(doc, args.word2))
    same = a == b
    out.emit("equal" if same else "different", {"equal": same})
    return EXIT_OK if same else EXIT_FALSE


def cmd_len(args, out):
    doc, spec = _load(args)
    n = syllable_length(normalize(spec, _word(doc, args.word)))
    out.emit(str(n), {"length": n})
    return EXIT_OK


def cmd_isolated(args, out):
    doc, spec = _load(args)
    pi = _pi(args, doc)
    c = normalize(spec, _word(doc, args.word))
    if c.is_identity():
        raise InputError("isolation needs a nontrivial element")
    st = isolation_status(spec, c, pi)
    if isinstance(st, Isolated):
        msg = "isolated" + ("" if st.exact else f" (search-based: {st.note})")
        out.emit(msg, {"status": "isolated", "exact": st.exact, "note": st.note})
        return EXIT_OK
    if isinstance(st, NotIsolated):
        x = format_nf(spec, st.x)
        out.emit(f"not isolated: ({x})^{st.q} lies in the subgroup",
                 {"status": "not-isolated", "x": x, "q": st.q})
        return EXIT_FALSE
    out.emit(f"unknown: {st.note}", {"status": "unknown", "note": st.note})
    return EXIT_BUDGET


def cmd_criterion(args, out):
    doc, spec = _load(args)
    pi = _pi(args, doc)
    rep = evaluate_criterion(spec, pi)
    d = rep.as_dict()
    d["pi"] = str(pi)
    lines = [f"{k}: {v}" for k, v in d.items() if k != "diagnosis"]
    lines += [f"diagnosis: {x}" for x in rep.diagnosis]
    out.emit("\n".join(lines), d)
    return EXIT_OK if rep.G_residual else EXIT_FALSE


def cmd_separate(args, out):
    doc, spec = _load(args)
    pi = _pi(args, doc)
    g, c = _word(doc, args.g), _word(doc, args.c)
    try:
        res = separate(spec, g, c, pi, _max_order(args, doc), budget=args.budget, jobs=args.jobs)
    except InSubgroup as e:
        raise InputError(str(e)) from None
    except CriterionFailure as e:
        out.emit(f"criterion fails: {e}", {"result": "criterion-failure", "diagnosis": e.report.diagnosis})
        return EXIT_FALSE
    if isinstance(res, SeparationFound):
        text = res.certificate.to_json()
        if args.out:
            write_atomic(args.out, text)
            out.emit(f"certificate of order {res.certificate.order} written to {args.out}",
                     {"result": "certificate", "order": res.certificate.order, "path": args.out})
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if isinstance(res, NotSeparable):
        data = {"result": "not-separable", "reason": res.reason}
        if res.witness is not None:
            data.update(x=format_nf(spec, res.witness.x), q=res.witness.q)
        out.emit(f"not separable: {res.reason}", data)
        return EXIT_FALSE
    out.emit(f"budget exhausted at order {res.frontier}: {res.note}",
             {"result": "budget-exhausted", "frontier": res.frontier, "note": res.note})
    return EXIT_BUDGET


def cmd_sep_hk(args, out):
    doc, spec = _load(args)
    pi = _pi(args, doc)
    g = normalize(spec, _word(doc, args.g))
    c = normalize(spec, _word(doc, args.c))
    if not (g.in_u() and c.in_u()):
        raise InputError("sep-hk needs both words to lie in U = H x K")
    res = separate_in_HK(spec, g, c, pi, _max_order(args, doc))
    if isinstance(res, InClosure):
        out.emit("in closure", {"result": "in-closure"})
        return EXIT_FALSE
    if isinstance(res, HKWitness):
        a, b = res.phi_A, res.phi_B
        out.emit(f"separated: A -> {a.target.name} images {list(a.images)}, "
                 f"B -> {b.target.name} images {list(b.images)}",
                 {"result": "separated", "A": {"target": a.target.name, "images": list(a.images)},
                  "B": {"target": b.target.name, "images": list(b.images)}})
        return EXIT_OK
    out.emit(f"budget exhausted: {res.note}", {"result": "budget-exhausted", "note": res.note})
    return EXIT_BUDGET


def cmd_verify(args, out):
    try:
        text = _read(args.cert)
        v = verify_certificate(text)
    except MalformedCertificate as e:
        raise InputError(f"malformed certificate: {e}") from None
    out.emit(v.message, {"verified": v.ok, "step": v.step, "message": v.message})
    return EXIT_OK if v.ok else EXIT_FALSE


def cmd_selftest(args, out):
    from .selftest import run_selftest
    failures = run_selftest(seed=args.seed, stream=out.stream, as_json=out.json)
    return EXIT_OK if not failures else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cyclicsep", description="Cyclic subgroup separability in "
                                 "free products with commuting subgroups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pi", help="'all' or a prime (defaults to the pi declared in the spec file, else 2)")
    common.add_argument("--max-order", type=int, dest="max_order", help="largest target group order")
    common.add_argument("--json", action="store_true", help="structured output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", parents=[common], help="normal form of a word")
    p.add_argument("word")
    p.add_argument("spec")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("eq", parents=[common], help="do two words define the same element")
    p.add_argument("word1")
    p.add_argument("word2")
    p.add_argument("spec")
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("len", parents=[common], help="syllable length")
    p.add_argument("word")
    p.add_argument("spec")
    p.set_defaults(func=cmd_len)

    p = sub.add_parser("isolated", parents=[common], help="is <c> closed under roots coprime to pi")
    p.add_argument("word")
    p.add_argument("spec")
    p.set_defaults(func=cmd_isolated)

    p = sub.add_parser("criterion", parents=[common], help="residuality criterion report")
    p.add_argument("spec")
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("separate", parents=[common], help="search a separating quotient")
    p.add_argument("g")
    p.add_argument("c")
    p.add_argument("spec")
    p.add_argument("--out", help="write the certificate here (atomically)")
    p.add_argument("--budget", type=int, help="cap on candidate homomorphisms")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("sep-hk", parents=[common], help="separate inside U = H x K")
    p.add_argument("g")
    p.add_argument("c")
    p.add_argument("spec")
    p.set_defaults(func=cmd_sep_hk)

    p = sub.add_parser("verify", parents=[common], help="check a certificate")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in corpus")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    out = _Out(args)
    try:
        return args.func(args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
