import json

import pytest

from cyclicsep.arith import PiSet
from cyclicsep.certificate import Certificate, MalformedCertificate, verify_certificate
from cyclicsep.dsl import parse_word, spec_to_text
from cyclicsep.finite_groups import abelian, cyclic, dihedral
from cyclicsep.separability import separate

from helpers import G22_TEXT, MIXED_TEXT, load

TWO = PiSet.single(2)


def klein_certificate(g="a b", c="a"):
    """The C2 x C2 witness: a -> (1,0), b -> (0,1)."""
    doc, spec = load(G22_TEXT)
    V = abelian([2, 2])
    return Certificate(spec_to_text(spec, TWO), "2", V.table, (2,), (1,), g, c)


def test_klein_certificate_verifies():
    v = verify_certificate(klein_certificate())
    assert v.ok and v.step is None


def test_swapped_certificate_also_verifies():
    # (1,0) lies outside <(1,1)>, so swapping g and c is still a witness
    assert verify_certificate(klein_certificate("a", "a b"))


def test_g_equal_c_fails_step_v():
    v = verify_certificate(klein_certificate("a", "a"))
    assert not v.ok and v.step == "v"


def test_corrupted_table_fails_step_i():
    cert = klein_certificate()
    table = [list(r) for r in cert.table]
    table[1][1], table[1][2] = table[1][2], table[1][1]
    bad = Certificate(cert.spec, cert.pi, tuple(map(tuple, table)), cert.images_A, cert.images_B, cert.g, cert.c)
    v = verify_certificate(bad)
    assert not v.ok and v.step == "i" and "step (i)" in v.message


def test_non_associative_latin_square_fails_step_i():
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    cert = klein_certificate()
    bad = Certificate(cert.spec, cert.pi, tuple(map(tuple, T)), (1,), (2,), cert.g, cert.c)
    assert verify_certificate(bad).step == "i"


def test_bad_homomorphism_fails_step_ii():
    doc, spec = load(MIXED_TEXT)
    D4 = dihedral(4)
    r = next(x for x in range(8) if D4.element_order(x) == 4)
    s = next(x for x in range(8) if D4.element_order(x) == 2 and not D4.commute(x, r))
    text = spec_to_text(spec, TWO)
    # images of s and t do not commute
    v = verify_certificate(Certificate(text, "2", D4.table, (0, 0), (r, s), "x", "y"))
    assert v.step == "ii"
    # t has order 4 in B, but its image in C8 has order 8
    v = verify_certificate(Certificate(text, "2", cyclic(8).table, (0, 0), (0, 1), "x", "y"))
    assert v.step == "ii" and "order dividing 4" in v.message
    # wrong number of generator images
    v = verify_certificate(Certificate(text, "2", D4.table, (0,), (0, 0), "x", "y"))
    assert v.step == "ii"


def test_commuting_failure_fails_step_iii():
    doc, spec = load(G22_TEXT.replace("a^2", "a").replace("b^2", "b"))
    D4 = dihedral(4)
    r = next(x for x in range(8) if D4.element_order(x) == 4)
    s = next(x for x in range(8) if D4.element_order(x) == 2 and not D4.commute(x, r))
    v = verify_certificate(Certificate(spec_to_text(spec), "2", D4.table, (r,), (s,), "a", "b"))
    assert v.step == "iii"


def test_unparsable_word_fails_step_iv():
    cert = klein_certificate("a q", "a")
    assert verify_certificate(cert).step == "iv"


def test_json_round_trip_is_exact():
    doc, spec = load(G22_TEXT)
    res = separate(spec, parse_word(doc, "b a"), parse_word(doc, "a b"), TWO, 16)
    text = res.certificate.to_json()
    assert Certificate.from_json(text).to_json() == text
    d = json.loads(text)
    assert list(d) == ["version", "spec", "pi", "group", "images", "g", "c", "claim"]
    assert d["group"]["order"] == len(d["group"]["table"]) == 8
    # one table row per line
    assert sum(1 for line in text.splitlines() if line.strip().startswith("[") and line.strip()[1:2].isdigit()) == 8
    assert verify_certificate(text)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("claim"),
    lambda d: d.update(version=2),
    lambda d: d.update(claim="maybe"),
    lambda d: d["group"].update(order=3),
    lambda d: d["images"].update(A=["x"]),
    lambda d: d.update(g=5),
    lambda d: d["group"].update(table="nope"),
])
def test_malformed_certificates(mutate):
    d = klein_certificate().to_dict()
    mutate(d)
    with pytest.raises(MalformedCertificate):
        verify_certificate(json.dumps(d))


def test_key_order_is_enforced():
    d = klein_certificate().to_dict()
    reordered = {k: d[k] for k in reversed(list(d))}
    with pytest.raises(MalformedCertificate):
        verify_certificate(json.dumps(reordered))
    with pytest.raises(MalformedCertificate):
        verify_certificate("{not json")
    d["spec"] = "A = free(a"
    with pytest.raises(MalformedCertificate):
        verify_certificate(json.dumps(d))
