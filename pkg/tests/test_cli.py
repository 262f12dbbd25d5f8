import json
import subprocess
import sys

import pytest

from pnsbounds.ci import ConfidenceSpec, theorem_margin
from pnsbounds.cli import main
from pnsbounds.scm import load_model, preset_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_plan_equal(capsys):
    code, out, _ = run(capsys, "plan", "--alpha", "0.05", "--epsilon", "0.05")
    doc = json.loads(out)
    assert code == 0 and doc["m"] == doc["n"] == 6147 and doc["kind"] == "full-bounds"


def test_plan_k_term(capsys):
    code, out, _ = run(capsys, "plan", "--alpha", "0.05", "--epsilon", "0.05", "--k-term", "1")
    assert code == 0 and json.loads(out)["m"] == 385


def test_plan_fixed_m_rounded(capsys):
    code, out, _ = run(capsys, "plan", "--epsilon", "0.05", "--fixed-m", "6147", "--z-rounded")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 6147 and doc["z"] == 1.96


def test_plan_domain_error(capsys):
    code, _, err = run(capsys, "plan", "--alpha", "0.05", "--epsilon", "2")
    assert code == 2 and "epsilon" in err


def test_bounds_probability_mode(capsys):
    code, out, _ = run(
        capsys, "bounds", "--exp", "1,0", "--obs", "0.5,0,0,0.5", "--m", "1000000000", "--n", "1000000000"
    )
    doc = json.loads(out)
    assert code == 0
    assert (doc["lower"], doc["upper"], doc["consistent"]) == (1.0, 1.0, True)
    assert doc["margins"]["worst_case_margin"] < 2e-4
    assert max(doc["margins"]["per_arm_margins_upper"]) < 2e-4


def test_bounds_counts_mode(capsys):
    code, out, _ = run(capsys, "bounds", "--exp-counts", "1,1,1,1", "--obs-counts", "2,0,1,1")
    doc = json.loads(out)
    assert code == 0
    assert doc["exp"] == {"p_y_do_x": 0.5, "p_y_do_xprime": 0.5}
    assert doc["obs"] == {"p_xy": 0.5, "p_xy_prime": 0.0, "p_xprime_y": 0.25, "p_xprime_yprime": 0.25}
    assert (doc["margins"]["m"], doc["margins"]["n"]) == (4, 4)


def test_bounds_empty_arm(capsys):
    code, _, err = run(capsys, "bounds", "--exp-counts", "3,2,0,0", "--obs-counts", "1,1,1,1")
    assert code == 3 and "control" in err


def test_bounds_invalid_distribution(capsys):
    code, _, _ = run(capsys, "bounds", "--exp", "0.5,0.5", "--obs", "0.5,0.5,0.5,0.5", "--m", "10", "--n", "10")
    assert code == 2


def test_oracle_piped_into_bounds(capsys, tmp_path):
    code, out, _ = run(capsys, "oracle", "--model", str(preset_path("model1")))
    assert code == 0
    oracle_doc = json.loads(out)
    assert oracle_doc["bounds"]["lower"] <= oracle_doc["true_pns"] <= oracle_doc["bounds"]["upper"]
    path = tmp_path / "o.json"
    path.write_text(out)
    code, out, _ = run(capsys, "bounds", "--from-json", str(path), "--m", "6147", "--n", "6147")
    margins = json.loads(out)["margins"]
    limit = theorem_margin(6147, 6147, ConfidenceSpec.from_alpha(0.05))
    assert limit <= 0.05
    assert max(margins["per_arm_margins_lower"] + margins["per_arm_margins_upper"]) <= limit


def test_gen_model_then_oracle(capsys, tmp_path):
    path = tmp_path / "m.json"
    assert run(capsys, "gen-model", "--seed", "1", "--out", str(path))[0] == 0
    load_model(path)
    code, out, _ = run(capsys, "oracle", "--model", str(path))
    doc = json.loads(out)
    assert code == 0
    assert sum(doc["obs"].values()) == pytest.approx(1.0, abs=1e-9)


def test_malformed_model(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"name": "x", "a": [1, 2]}')
    code, _, err = run(capsys, "oracle", "--model", str(path))
    assert code == 2 and "missing" in err
    path.write_text("not json")
    assert run(capsys, "oracle", "--model", str(path))[0] == 2


def test_sample_writes_csv(capsys, tmp_path):
    out = tmp_path / "exp.csv"
    args = ("sample", "--preset", "model2", "--kind", "experimental", "--size", "50", "--seed", "3", "--out", str(out))
    assert run(capsys, *args)[0] == 0
    first = out.read_bytes()
    lines = first.decode().splitlines()
    assert lines[0] == "x,y" and len(lines) == 51
    assert json.loads((tmp_path / "exp.csv.json").read_text()) == {"kind": "experimental", "seed": 3, "size": 50}
    run(capsys, *args)
    assert out.read_bytes() == first


def test_simulate_deterministic(capsys, tmp_path):
    outputs = []
    for d in ("a", "b"):
        code, out, _ = run(
            capsys, "simulate", "--preset", "model1", "--grid", "100,400", "--reps", "20", "--seed", "7",
            "--out-dir", str(tmp_path / d), "--threads", "2" if d == "b" else "1",
        )
        assert code == 0
        outputs.append(
            ((tmp_path / d / "model1_sweep.csv").read_bytes(), (tmp_path / d / "model1_replications.csv").read_bytes())
        )
    assert outputs[0] == outputs[1]


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--preset", "model1"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pnsbounds", "plan", "--epsilon", "0.05", "--k-term", "2"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["m"] == 1537
