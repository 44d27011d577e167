import math
import pathlib

import pytest

import l2torsion as l2

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_circle_torsion_is_one_half():
    report = l2.torsion(str(DATA / "circle.cc"), str(DATA / "rep_minus1.rep"))
    assert report["format_version"] == l2.format_version
    result = report["result"]
    assert result["euler_characteristic"] == 0
    assert result["coordinate"] == pytest.approx(0.5, rel=1e-12)


def test_non_unimodular_is_a_refusal():
    with pytest.raises(l2.MathematicalRefusal) as info:
        l2.torsion(DATA / "circle.cc", DATA / "rep_times2.rep")
    assert info.value.kind == "NotUnimodular"
    assert "Det = 2" in str(info.value)


def test_det_routes_agree():
    values = [
        l2.det(DATA / "mod.json", DATA / "op.json", method=m)["result"]["value"]
        for m in ("spectral", "path", "polar")
    ]
    for v in values[1:]:
        assert v == pytest.approx(values[0], rel=1e-8)


def test_dict_documents_and_fixtures():
    complex_doc = {
        "algebra": "C",
        "modules": [[1], [1]],
        "boundaries": [{"blocks": [[[2]]]}],
        "convention": "cochain",
    }
    result = l2.torsion(complex_doc)["result"]
    assert result["route_discrepancy"] < 1e-12
    betti = l2.betti("fixture:lens:3", "fixture:regular:Z/3:1")["result"]["betti"]
    assert betti == pytest.approx([1 / 3, 0, 0, 1 / 3])


def test_invariance_and_zeta():
    inv = l2.invariance("fixture:torus", "fixture:scalar:-1,1", convention="cochain")["result"]
    assert inv["relative_discrepancy"] < 1e-8
    z = l2.zeta("fixture:circle", "fixture:scalar:-1")["result"]
    assert z["relative_mismatch"] < 1e-9


def test_abelian_backend():
    value, verdict = l2.mahler_measure([-2, 1])
    assert value == pytest.approx(2.0, rel=1e-6)
    assert verdict == "Pass"
    value, verdict = l2.mahler_measure([-1, 1])
    assert value == pytest.approx(1.0, abs=1e-4)
    assert verdict == "Pass"
    verdicts = l2.classcheck(DATA / "circle_abelian.json")["result"]["verdicts"]
    assert all(v["verdict"] == "Pass" for v in verdicts)


def test_fk_det_blocks():
    # C (+) C with weights 1/2: Det diag(4, 9) = 2 * 3.
    value, log_value, verdict = l2.fk_det_blocks([(1, 0.5), (1, 0.5)], [[[4.0]], [[9.0]]])
    assert value == pytest.approx(6.0, rel=1e-12)
    assert log_value == pytest.approx(math.log(6.0), rel=1e-12)
    assert verdict == "Pass"


def test_validation_errors():
    with pytest.raises(l2.ValidationError) as info:
        l2.run("torsion", ["fixture:circle", "fixture:scalar:-1"], convention="sideways")
    assert info.value.kind in ("ValidationError", "ParseError")
    with pytest.raises(l2.ValidationError):
        l2.torsion({"algebra": "C", "modules": [[1]], "boundaries": [], "extra": 1})
    with pytest.raises(l2.L2TError):
        l2.run("nonsense", ["fixture:circle"])


def test_fixture_suite_passes():
    suite = l2.fixture_suite()["result"]
    assert suite["all_pass"], suite["cases"]


def test_structured_output_is_deterministic():
    a = l2.torsion("fixture:lens:3", "fixture:regular:Z/3:1")
    b = l2.torsion("fixture:lens:3", "fixture:regular:Z/3:1")
    assert a == b
