import json
import os
from fractions import Fraction
from pathlib import Path

import pytest

import pseudochart as pc

DATA = Path(os.environ.get("PSEUDOCHART_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_version_and_backends():
    assert pc.__version__
    assert "brute_finite_field" in pc.BACKENDS


def test_construct_and_verify_p2():
    doc, code = pc.construct("p2")
    assert code == pc.EXIT_OK
    assert doc["chart"]["claimed_degree"] == 8
    report, code = pc.verify(doc, samples=25)
    assert code == pc.EXIT_OK
    assert report["suites"]["degree"]["measured"] == 8


def test_verify_accepts_serialized_documents():
    doc, _ = pc.construct("p1n", n=2)
    direct, _ = pc.verify(doc, seed=4)
    parsed, _ = pc.verify(json.dumps(doc), seed=4)
    assert direct == parsed


def test_seed_is_recorded():
    doc, _ = pc.construct("pn", n=3, seed=7)
    assert doc["seed"] == 7


def test_bundle_atlas():
    doc, code = pc.construct("bundle", n=1, degrees=[0, 2])
    assert code == pc.EXIT_OK
    assert len(doc["atlas"]["charts"]) == 2
    report, code = pc.verify(doc)
    assert code == pc.EXIT_OK
    assert report["coverage"]["covered"] == 200


def test_corrupted_chart_is_rejected():
    doc, _ = pc.construct("p1")
    doc["chart"]["map"]["components"][0][1] = {"terms": []}
    report, code = pc.verify(doc)
    assert code == pc.EXIT_VERIFICATION_FAILURE
    assert "witness" in report


def test_brute_backend_agreement():
    doc, _ = pc.construct("p1n", n=2)
    report, code = pc.verify(doc, backend="brute", p=11)
    assert code == pc.EXIT_OK
    assert report["suites"]["backend_agreement"]["verdict"] == "AGREE"


def test_curves():
    assert pc.curve_complement_verdict("x^3+y^3+z^3")["outcome"] == "OBSTRUCTED"
    assert pc.curve_complement_verdict("x*z-y^2")["outcome"] == "INCONCLUSIVE"
    assert pc.plane_curve_genus("x^4+y^4+z^4") == 3
    assert pc.curve_smoothness("y^2*z-x^3")["verdict"] == "SINGULAR"


def test_obstruct_surface_file():
    doc, code = pc.obstruct(surface=str(DATA / "surfaces" / "p1xp1_one_ruling.json"))
    assert code == pc.EXIT_OK
    assert doc["verdict"]["reason"] == "TOO_FEW_COMPONENTS"


def test_boundary_verdict_and_catalog():
    presets = {m["name"]: m for m in pc.catalog()}
    assert presets["Bl3P2"]["rho"] == 4
    assert pc.boundary_verdict(presets["P1xP1"])["outcome"] == "INCONCLUSIVE"
    model = json.loads((DATA / "surfaces" / "p1xp1_rank_deficient.json").read_text())
    assert pc.boundary_verdict(model)["reason"] == "CLASSES_DO_NOT_GENERATE"


def test_rank_q():
    assert pc.rank_q([[1, 2], [2, 4]]) == 1
    assert pc.rank_q([[Fraction(1, 2), 1], [1, 2]]) == 1
    assert pc.rank_q([[1, 0], [0, "3/7"]]) == 2


def test_erratum():
    doc, code = pc.erratum(n=2, samples=10)
    assert code == pc.EXIT_OK
    rows = {(r["n"], r["family"]): r for r in doc["rows"]}
    assert rows[(2, "projective_space")]["formula_value"] == 4
    assert rows[(2, "projective_space")]["measured"] == 8


def test_errors_carry_codes():
    with pytest.raises(pc.PseudochartError) as info:
        pc.plane_curve_genus("x^2+w^2")
    assert info.value.code == "PARSE_ERROR"
    with pytest.raises(pc.PseudochartError) as info:
        pc.construct("pn", n=9)
    assert info.value.code == "INVALID_ARGUMENT"
    with pytest.raises(pc.PseudochartError):
        pc.verify("{not json")
