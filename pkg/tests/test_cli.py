import json
import subprocess
import sys

import pytest

from volint.cli import run

HOM_M2 = {"m": 2, "generators": [[{"angle": "1/3"}, {"angle": "2/5"}],
                                 [{"angle": "1/7"}, {"angle": "0/1"}],
                                 [{"angle": "1/2"}, {"angle": "3/4"}]]}


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def call_json(capsys, *argv):
    code, out = call(capsys, *argv, "--format", "json")
    assert code == 0, out
    return json.loads(out)


def test_fund_cycle_json(capsys):
    data = call_json(capsys, "fund-cycle", "3")
    assert len(data["chain"]["terms"]) == 6
    assert data["boundary_zero"] is True and data["volume"] == "1/1"


def test_rotnum_m2_is_zero(capsys, tmp_path):
    f = tmp_path / "hom.json"
    f.write_text(json.dumps(HOM_M2))
    code, out = call(capsys, "rotnum", "--hom", str(f))
    assert code == 0 and "lift: 0/1" in out
    data = call_json(capsys, "rotnum", "--hom", str(f), "--method", "chain")
    assert data["lift"] == "0/1"


def test_rotnum_m1_and_reflection(capsys):
    data = call_json(capsys, "rotnum", "--hom", '{"m":1,"generators":[[{"angle":"2/7"}]]}')
    assert data["lift"] == "2/7"
    refl = {"m": 1, "generators": [[{"angle": "1/4", "reflect": True}]]}
    data = call_json(capsys, "rotnum", "--hom", json.dumps(refl))
    assert data["lift"] == "0/1" and data["route"].startswith("reflection")


def test_pairing(capsys):
    assert call_json(capsys, "pairing", "--dim", "4")["value"] == "1/1"
    chain = '{"dim":2,"degree":2,"terms":[{"coeff":"3/1","vertices":[[0,0],[1,0],[0,1]]}]}'
    assert call_json(capsys, "pairing", "--chain", chain)["value"] == "3/2"


def test_audit(capsys):
    data = call_json(capsys, "audit", "--vol", "1/2", "--m", "2", "--hom", json.dumps(HOM_M2))
    assert data["defect"] == "1/2" and data["integral"] is False
    data = call_json(capsys, "audit", "--vol", "2/3", "--m", "2", "--bieberbach", "3")
    assert data["integral"] is True


def test_classify_and_decompose(capsys):
    boost = {"n": 2, "rows": [[1.5430806348152437, 0, 1.1752011936438014], [0, 1, 0],
                              [1.1752011936438014, 0, 1.5430806348152437]]}
    assert call_json(capsys, "classify", "--matrix", json.dumps(boost))["kind"] == "hyperbolic"
    data = call_json(capsys, "decompose-p", "--matrix", json.dumps(boost))
    assert data["t"] == pytest.approx(1.0, abs=1e-10)
    ident = {"n": 2, "rows": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
    family = {"family": [boost, ident]}
    assert call_json(capsys, "classify", "--matrix", json.dumps(family))["case"] == "IntoP"


def test_area_and_ideal_vol(capsys):
    pts = [{"kind": "ideal", "coords": [1, 0, 1]}, {"kind": "ideal", "coords": [-0.5, 0.8660254037844386, 1]},
           {"kind": "ideal", "coords": [-0.5, -0.8660254037844386, 1]}]
    assert call_json(capsys, "area", "--points", json.dumps(pts))["area"] == pytest.approx(3.14159265359)
    data = call_json(capsys, "ideal-vol", "0.5+0.8660254037844386j")
    assert data["volume"] == pytest.approx(1.01494160641, abs=1e-11)


def test_dehn(capsys):
    data = call_json(capsys, "dehn", "solve")
    assert data["volume"] == pytest.approx(2.02988321282, abs=1e-11)
    assert data["iterations"] < 50
    data = call_json(capsys, "dehn", "fill", "--slope", "5,1")
    assert data["volume"] == pytest.approx(0.981368828892, abs=1e-11)
    data = call_json(capsys, "dehn", "path", "--slope", "5,1", "--steps", "5")
    assert len(data["points"]) == 5 and all(len(p) == 2 for p in data["points"])


def test_double_and_transfer(capsys):
    data = call_json(capsys, "double", "--base", "1.5", "--k", "3", "--ell", "1")
    assert data == {"ratio": "2/3", "volume": 6.0}
    assert call_json(capsys, "transfer", "count", "--domain", "bad:10", "--N", "10")["count"] == 11
    data = call_json(capsys, "transfer", "demo", "--alpha", "const", "--inputs", "1/3")
    assert data["value"] == 1.0


def test_transfer_domain_file(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text('{"intervals": [["0/1", "1/2"], ["3/2", "2/1"]]}')
    assert call_json(capsys, "transfer", "count", "--domain", str(f), "--N", "1")["count"] == 2


@pytest.mark.parametrize("argv, code", [
    (["nosuch"], 2),
    (["fund-cycle", "3", "--bogus"], 2),
    (["fund-cycle", "20"], 2),
    (["rotnum", "--hom", "/does/not/exist.json"], 2),
    (["rotnum", "--hom", "{broken"], 2),
    (["dehn", "solve", "--max-iter", "0"], 3),
    (["dehn", "fill", "--slope", "1,0"], 3),
    (["dehn", "fill", "--slope", "4,2"], 2),
    (["dehn", "fill"], 2),
    (["double", "--base", "1", "--k", "5", "--ell", "5"], 2),
    (["classify", "--matrix", '{"n":2,"rows":[[2,0,0],[0,1,0],[0,0,1]]}'], 2),
    (["transfer", "count", "--domain", "bad:x"], 2),
    (["fund-cycle", "2", "--tol", "-1"], 2),
    ([], 2),
])
def test_error_paths(capsys, argv, code):
    got, out = call(capsys, *argv)
    assert got == code
    lines = out.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("error: ")


def test_help_exits_zero():
    proc = subprocess.run([sys.executable, "-m", "volint.cli", "dehn", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "--slope" in proc.stdout


def test_json_output_byte_identical_across_processes():
    cmds = [["fund-cycle", "3"], ["dehn", "path", "--slope", "5,1", "--steps", "4"],
            ["classify", "--matrix", '{"family":[{"n":2,"rows":[[1,0,0],[0,1,0],[0,0,1]]}]}'],
            ["transfer", "demo", "--domain", "bad:6", "--inputs", "1/3,2/5"]]
    for argv in cmds:
        outs = {subprocess.run([sys.executable, "-m", "volint.cli", *argv, "--format", "json", "--seed", "3"],
                               capture_output=True).stdout for _ in range(2)}
        assert len(outs) == 1


def test_digits_flag(capsys):
    data = call_json(capsys, "ideal-vol", "0.5+0.8660254037844386j", "--digits", "4")
    assert data["volume"] == 1.015
