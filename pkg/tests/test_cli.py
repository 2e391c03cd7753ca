import io
import json
import subprocess
import sys

import pytest

from peeltri import mapcore
from peeltri.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out), err


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run("series", "--bogus")
    assert code == 2


def test_missing_subcommand(capsys):
    code, _, _ = run()
    assert code == 2


def test_tau_output():
    data, _ = run_json("series", "--tau", "3", "1")
    assert data["value"] == "32" and data["decimal"] == "32"


def test_zp_exact_and_decimal():
    data, _ = run_json("series", "--zp", "1/8", "1")
    assert "sqrt(2)" in data["value"]
    assert len(data["decimal"].replace("0.", "").lstrip("0")) >= 45


def test_bad_rational_is_usage_error(capsys):
    code, _, _ = run("coeffs", "--h", "a/b")
    assert code == 2


def test_out_of_range_is_input_error():
    code, _, err = run("coeffs", "--h", "1/2")
    assert code == 2 and "error" in err


def test_coeffs_fields():
    data, _ = run_json("coeffs", "--h", "0", "--gamma", "1/2", "--pmax", "3")
    assert [c["value"] for c in data["C"]] == ["1", "1/2", "0"]
    closed, _ = run_json("coeffs", "--h", "0", "--gamma", "1/2", "--pmax", "3", "--closed-form")
    assert closed["C"] == data["C"]


def test_negativity():
    data, _ = run_json("negativity", "--h", "0", "--gamma", "3/4", "--cap", "10")
    assert data["p"] == 3
    data, _ = run_json("negativity", "--h", "1/8", "--gamma", "0", "--cap", "30")
    assert data["p"] is None


def test_verify_recursion_grid():
    data, _ = run_json("verify", "recursion", "--pmax", "8")
    assert len(data["points"]) == 25
    assert data["passed"] and all(pt["equal"] for pt in data["points"])


def test_verify_peeling_and_monotone():
    code, out, _ = run("verify", "monotone")
    assert code == 0
    code, out, _ = run("verify", "peeling")
    assert code == 0


def test_verify_failure_exit_code(monkeypatch):
    from peeltri import coeffs
    real = coeffs._C
    monkeypatch.setattr(coeffs, "_C", lambda atom, p: real(atom, p) + (1 if p == 2 else 0))
    code, _, err = run("verify", "peeling")
    assert code == 1 and "verification failed" in err


def test_csv_output():
    code, out, _ = run("coeffs", "--h", "1/8", "--pmax", "4", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "decimal,p,value" and len(lines) == 5


def test_sample_counts_csv():
    code, out, _ = run("sample", "psht", "--h", "1/4", "--radius", "1", "--n", "30", "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert sum(int(r.rsplit(",", 1)[1]) for r in rows) == 30


def test_sample_polygon_and_build():
    data, _ = run_json("sample", "polygon", "--p", "3", "--h", "1/16", "--seed", "4")
    assert data["volume"] >= 2
    data, _ = run_json("build", "tstar", "--radius", "2")
    t = mapcore.from_patch(data["patch"])
    assert t.face_count == 10 and t.vertex_count == 1


def test_enumerate_and_degree():
    data, _ = run_json("enumerate", "--n", "2")
    assert data["count"] == data["tutte"] == 32
    code, out, _ = run("enumerate", "--n", "1", "--emit", "jsonl")
    assert code == 0 and len(out.strip().splitlines()) == 4
    data, _ = run_json("degree", "--n", "3")
    assert data["passed"] and data["expected"] == "5/18"
    code, _, err = run("enumerate", "--n", "7")
    assert code == 2 and "budget" in err


def test_occ_with_pattern_file(tmp_path):
    f = tmp_path / "tri.json"
    f.write_text(json.dumps(mapcore.to_patch(mapcore.single_triangle())))
    data, _ = run_json("occ", "--pattern", str(f), "--n", "2")
    assert data["mean_ratio"]["value"] == "5/16"


def test_manifest_reproducible(tmp_path):
    argv = ["sample", "psht", "--h", "1/8", "--radius", "2", "--n", "20", "--seed", "9"]
    _, out1, err1 = run(*argv)
    _, out2, err2 = run(*argv)
    m1 = json.loads(err1)["manifest"]
    m2 = json.loads(err2)["manifest"]
    assert out1 == out2 and m1["output_sha256"] == m2["output_sha256"]
    assert m1["seed"] == 9 and m1["argv"] == argv
    target = tmp_path / "o.json"
    code, out, _ = run(*argv, "--output", str(target))
    assert code == 0 and out == ""
    m3 = json.loads((tmp_path / "o.json.manifest.json").read_text())
    assert m3["output_sha256"] == m1["output_sha256"]


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PEELTRI_SEED", "17")
    from peeltri import cli
    assert cli.build_parser().parse_args(["negativity", "--h", "0", "--gamma", "1"]).seed == 17


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "peeltri", "series", "--tau", "1", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == "1"
