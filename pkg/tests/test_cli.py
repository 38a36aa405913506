import json

import pytest

from cml import axioms
from cml.cli import main
from cml.formula import parse
from cml.kernel import kernel_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mc(capsys, k1_path):
    assert run(capsys, "mc", k1_path, "s0", "L[a,1] T")[:2] == (0, "true\n")
    assert run(capsys, "mc", k1_path, "s1", "L[a,1] T")[:2] == (1, "false\n")
    code, _, err = run(capsys, "mc", k1_path, "s9", "T")
    assert code == 2 and "s9" in err


def test_mc_d_and_json(capsys, k1_path):
    code, out, _ = run(capsys, "--format", "json", "mc", k1_path, "s0", "M[a,1] T", "--d")
    data = json.loads(out)
    assert code == 1 and data["satisfied"] is False and data["d"] == "1/2"
    assert data["schemaVersion"] == 1


def test_mc_formula_file(capsys, tmp_path, k1_path):
    f = tmp_path / "phi.txt"
    f.write_text("L[a,1] T &\n  ~M[a,1] T\n")
    assert run(capsys, "mc", k1_path, "s0", f"@{f}")[0] == 0


def test_mc_errors(capsys, k1_path, tmp_path):
    assert run(capsys, "mc", k1_path, "s0", "L[a,1")[0] == 2
    assert run(capsys, "mc", k1_path, "s0", "L[b,1] T")[0] == 2
    assert run(capsys, "mc", str(tmp_path / "missing.json"), "s0", "T")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": ["x"], "labels": ["a"], "rates": {"a": {"x": {"x": "-1/2"}}}}')
    assert run(capsys, "mc", str(bad), "x", "T")[0] == 2


def test_bisim(capsys, k1_path):
    code, out, _ = run(capsys, "bisim", k1_path, "s0", k1_path, "s0")
    assert code == 0 and out.strip() == "bisimilar"
    code, out, _ = run(capsys, "bisim", k1_path, "s0", k1_path, "s1")
    assert code == 1 and out.startswith("distinguished-by ")
    phi = out.split(" ", 1)[1].strip()
    assert run(capsys, "mc", k1_path, "s0", phi)[0] != run(capsys, "mc", k1_path, "s1", phi)[0]
    assert run(capsys, "bisim", "/nope.json", "s0", k1_path, "s0")[0] == 2


def test_sat_and_synth(capsys, tmp_path):
    out_file = tmp_path / "model.json"
    code, out, _ = run(capsys, "sat", "E[a,1] T", "--synth", str(out_file))
    assert code == 0 and out.startswith("sat")
    data = json.loads(out_file.read_text())
    assert set(data) == {"schemaVersion", "parameter", "model", "atoms"}
    k = kernel_from_json(data["model"])
    assert len(k.states) >= 1 and data["parameter"] >= 1
    assert set(data["atoms"]) == set(k.states)


def test_sat_verdicts(capsys):
    assert run(capsys, "sat", "L[a,2] T & M[a,1] T")[:2] == (1, "unsat\n")
    assert run(capsys, "sat", "T")[0] == 0


def test_sat_json_witness(capsys):
    code, out, _ = run(capsys, "--format", "json", "sat", "L[a,1/2] T")
    data = json.loads(out)
    w = data["witness"]
    from cml.kernel import Process, sat
    assert sat(Process(kernel_from_json(w["model"]), w["state"]), parse("L[a,1/2] T"))


def test_dist_pdist(capsys, k1_path):
    code, out, _ = run(capsys, "dist", "pdist", k1_path, "s0", k1_path, "s0")
    data = json.loads(out)
    assert code == 0 and data["value"] == "0" and data["exact"] is False
    assert data["family"]["depth"] == 3
    code, out, _ = run(capsys, "dist", "pdist", k1_path, "s0", k1_path, "s1")
    assert json.loads(out)["value"] == "3/2"


def test_dist_fdist(capsys, k1_path):
    code, out, _ = run(capsys, "dist", "fdist", "L[a,1] T", "L[a,1] T", "--model", k1_path)
    assert code == 0 and json.loads(out)["value"] == "0"
    code, out, _ = run(capsys, "dist", "fdist", "L[a,1] T", "L[a,2] T", "--model", k1_path,
                       "--states", "s1")
    assert json.loads(out)["value"] == "1"


def test_dist_sdhat(capsys, tmp_path):
    code, out, _ = run(capsys, "dist", "sdhat", "L[a,1] T", "L[a,1] T", "L[a,0] T")
    data = json.loads(out)
    assert code == 0 and data["exact"] is True and data["parameter"] >= 1


def test_dist_sdhat_check_weak(capsys, tmp_path):
    slow = tmp_path / "slow.json"
    slow.write_text('{"states": ["x"], "labels": ["a"], "rates": {"a": {"x": {"x": "1"}}}}')
    fast = tmp_path / "fast.json"
    fast.write_text('{"states": ["x"], "labels": ["a"], "rates": {"a": {"x": {"x": "5"}}}}')
    args = ["dist", "sdhat", "E[a,1] T", "M[a,0] T", "T", "--check-weak"]
    code, out, _ = run(capsys, *args, str(slow), "x")
    assert code == 0 and json.loads(out)["weakRobustness"]["holds"] is True
    code, out, _ = run(capsys, *args, str(fast), "x")
    assert code == 1 and json.loads(out)["weakRobustness"]["holds"] is False


def test_dist_errors(capsys, k1_path):
    assert run(capsys, "dist", "pdist", k1_path, "s0")[0] == 2
    assert run(capsys, "dist", "sdhat", "L[a,1] T", "L[a,1/2] T", "T")[0] == 2


def test_axioms(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, out, _ = run(capsys, "axioms", "--schemas", "A1,LM2", "--samples", "50",
                       "--out", str(out_file))
    assert code == 0
    data = json.loads(out_file.read_text())
    assert data["schemas"]["LM2"]["violations"] == 0


def test_axioms_unsound_mode(capsys):
    code, out, _ = run(capsys, "axioms", "--schemas", "B2", "--samples", "50")
    data = json.loads(out)
    assert code == 0 and data["schemas"]["B2"]["violations"] > 0


def test_axioms_zero_samples(capsys):
    assert run(capsys, "axioms", "--samples", "0")[0] == 2


def test_countermodels_via_cli(capsys):
    for schema in axioms.COUNTERMODELS:
        path, state, text = axioms.countermodel_paths(schema)
        assert run(capsys, "mc", path, state, text)[:2] == (1, "false\n")


def test_config(capsys, tmp_path, k1_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"depth": 1, "format": "text", "clamp": True}))
    code, out, _ = run(capsys, "--config", str(cfg), "dist", "pdist", k1_path, "s0", k1_path, "s1")
    assert code == 0 and out.strip() == "pdist=1"
    cfg.write_text(json.dumps({"depth": 1, "bogus": 2}))
    assert run(capsys, "--config", str(cfg), "mc", k1_path, "s0", "T")[0] == 2
    cfg.write_text(json.dumps({"granularity": 0}))
    assert run(capsys, "--config", str(cfg), "mc", k1_path, "s0", "T")[0] == 2


def test_global_flags_after_command(capsys, k1_path):
    code, out, _ = run(capsys, "mc", k1_path, "s0", "L[a,2] T", "--d", "--format", "json")
    assert json.loads(out)["d"] == "1/2"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
