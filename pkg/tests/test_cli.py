import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from gmpy2 import mpq

from hbops.bodies import IntersectPoly, PBall, PolytopeH, Scale, SpaceHandle, SumOne
from hbops.cli import AnalysisReport, analyze_space, main
from hbops.hahn_banach import construct_rank_k
from hbops.io import (
    SchemaError,
    body_from_json,
    body_to_json,
    certificate_from_json,
    certificate_to_json,
    load_operator,
    load_space,
    save_space,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args])

    return invoke


def test_load_space_examples():
    cube = load_space(DATA / "cube_3.json")
    assert cube.is_polytopal and cube.dim == 3
    with pytest.raises(ValueError, match="not symmetric"):
        load_space(DATA / "asymmetric.json")


def test_parse_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_space(p)
    with pytest.raises(SchemaError, match="unknown body kind"):
        body_from_json({"kind": "banana"})
    with pytest.raises(SchemaError):
        body_from_json({"kind": "polytopeV", "vertices": [["1", "x"]]})


@pytest.mark.parametrize("body", [
    PBall(3, mpq(5, 2)),
    PolytopeH(((1, 0), (-1, 0), (0, 2), (0, -2))),
    SumOne((PBall(2, 2), Scale(mpq(3, 7), PBall(1, 1)))),
    IntersectPoly((Scale(mpq(11, 10), PBall(3, 1)), PBall(3, "inf"))),
])
def test_space_round_trip(body, tmp_path):
    S = SpaceHandle(body)
    save_space(S, tmp_path / "s.json")
    assert load_space(tmp_path / "s.json") == S
    assert body_to_json(body_from_json(body_to_json(body))) == body_to_json(body)


def test_operator_file_refs(tmp_path):
    (tmp_path / "x.json").write_text(json.dumps({"kind": "pball", "dim": 2, "p": "1"}))
    (tmp_path / "op.json").write_text(json.dumps({"domain": "x.json", "codomain": "x.json",
                                                   "matrix": [["1", "0"], ["0", "1/2"]]}))
    T = load_operator(tmp_path / "op.json")
    assert T.matrix[1][1] == mpq(1, 2)
    (tmp_path / "bad.json").write_text(json.dumps({"domain": "x.json", "codomain": "x.json",
                                                    "matrix": [["1", "0", "0"]]}))
    with pytest.raises(SchemaError):
        load_operator(tmp_path / "bad.json")


def test_certificate_round_trip():
    X = SpaceHandle(PBall(2, 1))
    _, c = construct_rank_k(X, X, 2)
    again = certificate_from_json(json.loads(json.dumps(certificate_to_json(c))))
    assert again.atoms == c.atoms and again.operator.matrix == c.operator.matrix and again.rank == 2


def test_analysis_report_round_trip():
    rep = analyze_space(SpaceHandle(PBall(3, "inf")))
    d = json.loads(json.dumps(rep.to_json()))
    assert AnalysisReport.from_json(d) == rep
    assert rep.f == 2 and rep.vertex_count == 8 and rep.facet_count == 6


def test_check_hb_remark(run):
    r = run("check-hb", DATA / "remark_n3_eps01.json", "--json")
    assert r.exit_code == 1
    out = json.loads(r.output)
    assert out["tag"] == "NotHB" and out["gap"] == "4/11"


def test_construct_and_verify(run, tmp_path):
    cert = tmp_path / "cert.json"
    r = run("construct", "--X", DATA / "l1_2.json", "--Y", DATA / "l1_2.json", "--k", 2, "-o", cert)
    assert r.exit_code == 0 and cert.exists()
    r = run("verify-cert", cert, "--json")
    assert r.exit_code == 0 and json.loads(r.output)["valid"] is True
    d = json.loads(cert.read_text())
    d["atoms"][0]["vector"] = ["2", "2"]
    cert.write_text(json.dumps(d))
    assert run("verify-cert", cert).exit_code == 1


def test_construct_out_of_range(run):
    r = run("construct", "--X", DATA / "l2_2.json", "--Y", DATA / "l2_2.json", "--k", 2)
    assert r.exit_code == 1
    assert "f(X*) + f(Y) + 1" in r.output


def test_theorem1_command(run, tmp_path):
    assert run("theorem1", DATA / "remark_n3_eps01.json").exit_code == 0
    op = json.loads((DATA / "remark_n3_eps01.json").read_text())
    op["matrix"] = [["2", "0", "0"], ["0", "2", "0"], ["0", "0", "2"]]
    p = tmp_path / "op.json"
    p.write_text(json.dumps(op))
    r = run("theorem1", p)
    assert r.exit_code == 2 and "rescale" in r.output


def test_usage_and_validation_errors(run):
    assert run("analyze", DATA / "asymmetric.json").exit_code == 2
    assert run("analyze", "missing.json").exit_code == 2
    assert run("construct", "--X", DATA / "l1_2.json").exit_code == 2
    assert run("render2d", DATA / "cube_3.json").exit_code == 2


def test_text_and_json_agree(run):
    js = json.loads(run("analyze", DATA / "l2_l2_sum1.json", "--json").output)
    text = run("analyze", DATA / "l2_l2_sum1.json").output
    assert f"f: {js['f']}" in text
    assert "center: (1/2, 0, 1/2, 0)" in text
    assert js["witness"]["center"] == ["1/2", "0", "1/2", "0"]


def test_dual(run, tmp_path):
    out = tmp_path / "d.json"
    r = run("dual", DATA / "l1_2.json", "-o", out, "--json")
    assert r.exit_code == 0
    assert json.loads(out.read_text()) == {"kind": "pball", "dim": 2, "p": "inf"}
    assert json.loads(r.output)["vertex_count"] == 4


def test_render2d(run, tmp_path):
    out = tmp_path / "ball.svg"
    assert run("render2d", DATA / "l1_2.json", "-o", out).exit_code == 0
    svg = out.read_text()
    assert svg.startswith("<svg") and 'points="0,-1 1,0 0,1 -1,0"' in svg
    r = run("render2d", DATA / "l2_2.json")
    pts = r.output.split('points="')[1].split('"')[0].split()
    assert len(pts) == 256


def test_check_hb_lower_bound(run, tmp_path):
    op = {"domain": {"kind": "pball", "dim": 2, "p": "2"}, "codomain": {"kind": "pball", "dim": 2, "p": "2"},
          "matrix": [["1", "0"], ["0", "1"]]}
    p = tmp_path / "id.json"
    p.write_text(json.dumps(op))
    r = run("check-hb", p, "--net", 8, "--json")
    out = json.loads(r.output)
    assert out["tag"] == "LowerBoundOnly" and out["bound"] > 1.2
    assert r.exit_code == 1
