import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from spinchain import cli, gates, runner

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_run_csv(capsys):
    code, out, _ = run(["run", str(DATA / "transfer3.exp")], capsys)
    assert code == 0
    assert out == (GOLDEN / "transfer3.csv").read_text()


def test_run_json_mirrors_csv(capsys):
    code, out, _ = run(["run", str(DATA / "circuit.exp"), "--format", "json"], capsys)
    assert code == 0
    recs = json.loads(out)
    csv_rows = (GOLDEN / "circuit.csv").read_text().splitlines()[1:]
    assert len(recs) == len(csv_rows)
    for r, line in zip(recs, csv_rows):
        step, node, p = line.split(",")
        assert (r["step"], r["node"]) == (int(step), int(node)) and r["probability"] == float(p)


def test_output_path(tmp_path, capsys):
    exp = tmp_path / "e.exp"
    dest = tmp_path / "out.csv"
    exp.write_text((DATA / "minimal.exp").read_text() + f"\n[output]\npath = {dest}\n")
    code, out, _ = run(["run", str(exp)], capsys)
    assert code == 0 and out == ""
    assert dest.read_text() == (GOLDEN / "minimal.csv").read_text()


def test_verify_ok(capsys):
    code, _, err = run(["verify", str(DATA / "circuit.exp"), "--max-n", "10", "--tol", "1e-9"], capsys)
    assert code == 0 and "ok" in err


def test_verify_skips_large_n(tmp_path, capsys):
    exp = tmp_path / "big.exp"
    exp.write_text("[chain]\nn = 14\nhamiltonian = adjacency\n[walk]\ninitial = 1\n")
    code, _, err = run(["verify", str(exp), "--max-n", "10"], capsys)
    assert code == 0 and "skipped" in err


def test_verify_in_file_runs_after_output(tmp_path, capsys):
    exp = tmp_path / "v.exp"
    exp.write_text((DATA / "minimal.exp").read_text() + "\n[verify]\nmax_n = 6\n")
    code, out, err = run(["run", str(exp)], capsys)
    assert code == 0 and out.startswith("step,node,probability") and "verify" in err


def test_diagnostic_exit_code(capsys):
    code, _, err = run(["run", str(DATA / "diag" / "E-ARITY.exp")], capsys)
    assert code == 1 and "E-ARITY" in err


def test_missing_file(capsys):
    code, _, err = run(["run", "/nonexistent/x.exp"], capsys)
    assert code == 1 and err


def test_classify(capsys):
    entries = [str(v.real) for v in gates.SIGNED_SWAP.ravel()]
    code, out, _ = run(["classify", *entries], capsys)
    assert code == 0 and out.splitlines()[0] == "class: AdmissibleMatchgate"
    entries = [str(v.real) for v in gates.SWAP.ravel()]
    code, out, _ = run(["classify", *entries], capsys)
    assert out.splitlines()[0] == "class: NumberPreserving"
    assert any(line.startswith("thetaT:") for line in out.splitlines())


def test_classify_term_coefficients(capsys):
    g = gates.builtin_gate("xy", 0.25)
    code, out, _ = run(["classify", ",".join(f"{z.real}{z.imag:+}i" for z in g.ravel())], capsys)
    terms = dict(line.split(": ") for line in out.splitlines()[1:])
    assert float(terms["sigma"]) == pytest.approx(0.25, abs=1e-12)
    assert float(terms["delta"]) == pytest.approx(0.0, abs=1e-12)


def test_classify_bad_input(capsys):
    assert run(["classify", "1", "2"], capsys)[0] == 1
    assert run(["classify", *["2"] * 16], capsys)[0] == 1


def test_bench_json(capsys, monkeypatch):
    monkeypatch.setenv("SPINCHAIN_SEED", "7")
    code, out, _ = run(["bench", "--sizes", "16,32", "--depth", "5", "--dense-n", "5", "--dense-depth", "4", "--json"], capsys)
    payload = json.loads(out)
    assert code == 0 and payload["seed"] == 7
    assert [r["n"] for r in payload["rows"]] == [16, 32, 5]
    assert payload["dense_max_deviation"] < 1e-12


def test_bench_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("SPINCHAIN_SEED", "3")
    rng1 = np.random.default_rng(cli.seed())
    rng2 = np.random.default_rng(cli.seed())
    assert rng1.integers(1 << 30) == rng2.integers(1 << 30)


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "spinchain.cli", "run", str(DATA / "hadamard.exp")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "hadamard.csv").read_text()


def test_verify_exit_two_on_perturbation(monkeypatch, capsys):
    real = runner.step_evolution

    def perturbed(cfg):
        e = real(cfg)
        return type(e)(e.U + 1e-6 * np.ones((e.n, e.n)), e.vacuum_phase)

    monkeypatch.setattr(runner, "step_evolution", perturbed)
    code, _, err = run(["verify", str(DATA / "minimal.exp")], capsys)
    assert code == 2 and "MISMATCH" in err
