import json
from fractions import Fraction as F

import pytest

from flatlab.cli import main, parse_number, parse_pair
from flatlab.errors import MixedField
from flatlab.exactfield import QuadNum, sqrt_d
from flatlab.io import load_surface, read_json, save_surface
from flatlab.surface import area

from conftest import R2


@pytest.fixture
def lm_file(tmp_path, lm_surface):
    p = tmp_path / "lm.json"
    save_surface(p, lm_surface)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_number():
    assert parse_number("1+sqrt(2)") == 1 + R2
    assert parse_number("3/4") == F(3, 4)
    assert parse_number("0.1") == F(1, 10)
    assert parse_number("2*sqrt(8)") == 4 * R2
    assert parse_number("phi") == (1 + sqrt_d(5)) / 2
    assert parse_number("sqrt(2)**2") == 2
    assert parse_pair("1, -1/2") == (1, F(-1, 2))
    with pytest.raises(ValueError):
        parse_number("__import__('os')")
    with pytest.raises(MixedField):
        parse_number("sqrt(2)+sqrt(3)")


def test_build_and_validate(tmp_path, capsys):
    out = tmp_path / "z.json"
    code, _, _ = run(capsys, "build", "ztable", "--params", '{"w1": "1", "w2": "sqrt(2)", "h1": "1", "h2": "1", "h3": "1"}',
                     "--out", out)
    assert code == 0
    S = load_surface(out)
    assert S.d == 2 and area(S) == 2 + 2 * R2
    assert (tmp_path / "z.json.manifest.json").exists()
    code, text, _ = run(capsys, "validate", "-s", out)
    assert code == 0
    rep = json.loads(text)
    assert rep["stratum"] == "H(1,1)" and rep["gauss_bonnet"] and rep["genus"] == 2


def test_check_lm(lm_file, capsys):
    code, text, _ = run(capsys, "check-lm", "-s", lm_file)
    assert code == 0
    rep = json.loads(text)
    assert rep["verdict"] == "member"
    assert QuadNum.from_json(rep["m"]) == 2 * R2


def test_cylinders_and_not_periodic(tmp_path, capsys):
    sq = tmp_path / "sq.json"
    assert run(capsys, "build", "square", "-o", sq)[0] == 0
    code, text, _ = run(capsys, "cylinders", "-s", sq)
    assert code == 0 and len(json.loads(text)["cylinders"]) == 1
    code, _, err = run(capsys, "check-lm", "-s", sq, "--dir", "1,sqrt(2)", "--budget", "500")
    assert code == 2
    assert json.loads(err)["code"] == "TraceBudgetExceeded"


def test_saddles_act_rel(lm_file, tmp_path, capsys):
    code, text, _ = run(capsys, "saddles", "-s", lm_file, "-L", "1")
    assert code == 0
    scs = json.loads(text)
    assert all(set(s) == {"holonomy", "from", "to"} for s in scs) and scs
    sheared = tmp_path / "u.json"
    assert run(capsys, "act", "-s", lm_file, "--matrix", "1,1/2,0,1", "--canonicalize", "-o", sheared)[0] == 0
    assert area(load_surface(sheared)) == area(load_surface(lm_file))
    code, text, _ = run(capsys, "rel", "-s", lm_file, "--vector", "1/5,1/7")
    assert code == 0 and json.loads(text)["kind"] == "surface"


def test_structured_errors(tmp_path, capsys, ltable22):
    p = tmp_path / "l.json"
    save_surface(p, ltable22)
    code, _, err = run(capsys, "rel", "-s", p, "--vector", "1/10,0")
    assert code == 2
    e = json.loads(err)
    assert e["code"] == "WrongStratum" and "message" in e
    code, _, err = run(capsys, "build", "ztable", "--params", '{"w1": "1", "w2": "1", "h1": "1", "h2": "1", "h3": "0"}')
    assert code == 2 and json.loads(err)["code"] == "InvalidParams"
    assert run(capsys, "validate", "-s", p, "--bogus")[0] == 1


def test_average_writes_csv(lm_file, tmp_path, capsys):
    out = tmp_path / "avg.csv"
    code, text, _ = run(capsys, "average", "-s", lm_file, "--T", "2", "--dt", "1/4", "--cap", "1.0", "-o", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "T,value,err_estimate"
    assert json.loads(text)["mode"] == "U"
    man = read_json(str(out) + ".manifest.json")
    assert man["exact"] is False and man["seed"] == 42


def test_replay_and_hash_mismatch(lm_file, tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(capsys, "check-lm", "-s", lm_file, "-o", out)[0] == 0
    manifest = str(out) + ".manifest.json"
    code, text, _ = run(capsys, "replay", manifest)
    assert code == 0 and set(json.loads(text)["outputs"].values()) == {"identical"}
    lm_file.write_text(lm_file.read_text().replace('"label"', '"label" ', 1))
    code, _, err = run(capsys, "replay", manifest)
    assert code == 2 and json.loads(err)["code"] == "HashMismatch"


def test_replay_detects_drift(lm_file, tmp_path, capsys):
    out = tmp_path / "c.json"
    assert run(capsys, "cylinders", "-s", lm_file, "-o", out)[0] == 0
    manifest = tmp_path / "c.json.manifest.json"
    data = json.loads(manifest.read_text())
    data["outputs"][str(out)] = "0" * 64
    manifest.write_text(json.dumps(data))
    code, _, err = run(capsys, "replay", manifest)
    assert code == 2 and json.loads(err)["code"] == "OutputDrift"


def test_divergence_verify(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, text, _ = run(capsys, "divergence-verify", "--family", "caseB", "--kmax", "1e5", "-o", out)
    assert code == 0
    assert json.loads(text)["passed"] is True
    assert out.read_text().startswith("k,diag_part,x_part,distance")
    code, text, _ = run(capsys, "replay", str(out) + ".manifest.json")
    assert code == 0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('[divergence-verify]\nfamily = "caseB"\nkmax = "1e4"\n')
    out = tmp_path / "d.csv"
    code, text, _ = run(capsys, "--config", cfg, "divergence-verify", "-o", out)
    assert code == 0 and json.loads(text)["case"] == "B"


def test_equidist_from_manifest(tmp_path, capsys, lm_surface):
    save_surface(tmp_path / "a.json", lm_surface)
    (tmp_path / "exp.json").write_text(json.dumps({
        "surfaces": [{"ref": "a", "path": "a.json"}],
        "observable": {"name": "constant", "params": {"c": 0.5}},
        "T_schedule": [4, 9],
        "n_t": 4,
    }))
    out = tmp_path / "eq.csv"
    code, _, _ = run(capsys, "equidist", "--manifest", tmp_path / "exp.json", "-o", out)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "surface,T,value,err_estimate,status,increment"
    assert len(rows) == 3
    assert (tmp_path / "eq.csv.runs.json").exists()
