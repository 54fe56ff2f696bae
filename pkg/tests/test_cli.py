import json
import math
from pathlib import Path

import pytest

from qmeter.cli import main

CORPUS = Path(__file__).resolve().parent / "corpus"
MANIFEST = json.loads((CORPUS / "manifest.json").read_text())


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("case", MANIFEST, ids=[c["file"] for c in MANIFEST])
def test_failing_corpus_exit_codes(capsys, case):
    code, out, err = _run(capsys, case["command"], CORPUS / case["file"])
    assert code == case["exit"]
    assert case["message"] in err
    assert out == ""


def test_usage_errors_exit_2(capsys, scenario_dir):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", str(scenario_dir / "eigenbasis-trivial.json")])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sample", str(scenario_dir / "eigenbasis-trivial.json"), "--n", "0"])
    assert exc.value.code == 2


def test_missing_file_is_parse_error(capsys, tmp_path):
    code, _, err = _run(capsys, "validate", tmp_path / "nope.json")
    assert code == 2 and "cannot read" in err


def test_optimize_pi8(capsys, scenario_dir, tmp_path):
    out_json = tmp_path / "r.json"
    code, out, _ = _run(capsys, "optimize", scenario_dir / "theta-pi8-deterministic.json", "--json", out_json)
    assert code == 0
    assert "0.414214" in out and "2.41421" in out
    assert "min total error: 0\n" in out
    rep = json.loads(out_json.read_text())
    values = [o["optimal"] for o in rep["outcomes"]]
    assert values == pytest.approx([math.sqrt(2) - 1, math.sqrt(2) + 1], abs=1e-12)
    assert rep["min_total"] < 1e-12


def test_certify_complex_state(capsys, scenario_dir, tmp_path):
    out_json = tmp_path / "c.json"
    code, out, _ = _run(capsys, "certify", scenario_dir / "complex-state-nondeterministic.json",
                        "--json", out_json)
    assert code == 0
    assert "verdict: not deterministic" in out
    assert out.count("0.707107") == 2
    rep = json.loads(out_json.read_text())
    assert not rep["deterministic"]
    assert [r["magnitude"] for r in rep["residuals"]] == pytest.approx([math.sqrt(0.5)] * 2, abs=1e-12)


def test_validate_corpus_incomplete_povm_message(capsys):
    code, _, err = _run(capsys, "validate", CORPUS / "povm-incomplete.json")
    assert code == 1 and "max deviation" in err


@pytest.mark.parametrize("command,extra", [
    ("validate", []), ("probs", []), ("error", []), ("optimize", []), ("certify", []),
    ("decompose", ["--b-psi", "3.7"]), ("quasiprob", ["--complex"]), ("weakmeas", ["--phi-grid", "0.1,0.05"]),
    ("sample", ["--n", "2000", "--seed", "5"]),
])
def test_json_output_is_byte_identical(capsys, scenario_dir, tmp_path, command, extra):
    path = scenario_dir / "theta-pi8-deterministic.json"
    outputs = []
    for k in range(2):
        target = tmp_path / f"{command}{k}.json"
        code, _, _ = _run(capsys, command, path, "--json", target, *extra)
        assert code == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    json.loads(outputs[0])


def test_json_keeps_full_precision(capsys, scenario_dir, tmp_path):
    target = tmp_path / "p.json"
    _run(capsys, "probs", scenario_dir / "theta-pi8-deterministic.json", "--json", target)
    p = json.loads(target.read_text())["probabilities"][0]["p"]
    assert abs(p - (1 + math.sin(math.pi / 4)) / 2) < 1e-15
    assert repr(p) in target.read_text()


def test_decompose_reports_variance_identity(capsys, scenario_dir, tmp_path):
    target = tmp_path / "d.json"
    code, out, _ = _run(capsys, "decompose", scenario_dir / "theta-pi8-deterministic.json", "--json", target)
    assert code == 0
    rep = json.loads(target.read_text())
    assert rep["eigen_residual"] < 1e-12
    assert rep["var_A"] == pytest.approx(rep["var_M"], abs=1e-9)
    assert rep["cov_AM"] == pytest.approx(rep["var_A"], abs=1e-9)


def test_quasiprob_verdicts(capsys, scenario_dir):
    _, out, _ = _run(capsys, "quasiprob", scenario_dir / "theta-pi8-deterministic.json")
    assert "verdict: non-classical" in out and "-0.103553" in out
    _, out, _ = _run(capsys, "quasiprob", scenario_dir / "eigenbasis-trivial.json")
    assert "verdict: classical-representable" in out


def test_weakmeas_ratios(capsys, scenario_dir, tmp_path):
    target = tmp_path / "w.json"
    code, _, _ = _run(capsys, "weakmeas", scenario_dir / "theta-pi8-deterministic.json",
                      "--phi-grid", "0.1,0.05,0.025", "--json", target)
    assert code == 0
    rep = json.loads(target.read_text())
    for post in rep["postselections"]:
        assert all(3.5 <= r <= 4.5 for r in post["halving_ratios"])


def test_sample_output(capsys, scenario_dir):
    code, out, _ = _run(capsys, "sample", scenario_dir / "eigenbasis-trivial.json", "--n", "100", "--seed", "3")
    assert code == 0 and "seed = 3" in out


def test_strict_profile_flag(capsys, scenario_dir):
    code, out, _ = _run(capsys, "certify", scenario_dir / "theta-pi8-deterministic.json",
                        "--tolerance-profile", "strict")
    assert code == 0 and "verdict: deterministic" in out


def test_no_ansi_when_disabled(capsys, scenario_dir, monkeypatch):
    monkeypatch.setenv("QMETER_NO_COLOR", "1")
    _, out, _ = _run(capsys, "quasiprob", scenario_dir / "theta-pi8-deterministic.json")
    assert "\033[" not in out
