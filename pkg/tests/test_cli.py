import json
from pathlib import Path

import pytest

from legoqec.cli import main
from oracles import enumerate_pnd
from legoqec.codes import five_qubit_code


def files(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file() and p.suffix != ".png" and p.name != "index.lock"}


def run(args, out):
    assert main([*args, "--out", str(out)]) == 0


def test_evaluate_bundled_code_matches_oracle(tmp_path, capsys):
    run(["evaluate", "--code", "five_qubit", "--noise", "iso:0.01", "--exact"], tmp_path)
    rep = json.loads((tmp_path / "evaluate_summary.json").read_text())["report"]
    assert rep["p_nd"] == pytest.approx(enumerate_pnd(five_qubit_code(), 0.01), abs=1e-10)
    assert "p_ND" in capsys.readouterr().out


@pytest.mark.parametrize(
    "args",
    [
        ["evaluate", "--code", "five_qubit", "--noise", "iso:0.02", "--shots", "3000", "--seed", "4"],
        ["evaluate", "--code", "trivial", "--noise", "relax:0.1", "--backend", "mock-remote", "--shots", "1200", "--alpha", "0.5"],
        ["channel-check", "--delta", "0.3"],
        ["learn", "--episodes", "6", "--agent", "random", "--max-qubits", "5", "--noise", "iso:0.05"],
        ["fit", "--shots", "600", "--no-plots"],
    ],
)
def test_commands_are_byte_deterministic(tmp_path, args):
    run(args, tmp_path / "a")
    run(args, tmp_path / "b")
    fa, fb = files(tmp_path / "a"), files(tmp_path / "b")
    assert fa and fa == fb
    # re-running in place leaves the artifacts untouched
    run(args, tmp_path / "a")
    assert files(tmp_path / "a") == fa


def test_channel_check_prints_small_distance(tmp_path, capsys):
    run(["channel-check", "--delta", "0.3"], tmp_path)
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert float(line.split()[-1]) < 1e-10


def test_fit_from_file(tmp_path):
    rows = "\n".join(f"{a} {b} {c} {2.718281828459045 ** (-0.001 * a - 0.002 * b - 0.01 * c)!r}" for a, b, c in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 3, 4)])
    (tmp_path / "runs.txt").write_text("# N_q N_1 N_2 fraction\n" + rows + "\n")
    run(["fit", "--runs", str(tmp_path / "runs.txt")], tmp_path)
    model = json.loads((tmp_path / "fit_summary.json").read_text())["model"]
    assert model["c_2"] == pytest.approx(-0.01, abs=1e-9)
    assert (tmp_path / "fit_scatter.png").exists()


def test_model_file_drives_renormalization(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"c_q": -1e-4, "c_1": -1e-4, "c_2": -1e-3}))
    run(["evaluate", "--code", "five_qubit", "--noise", "relax:0.1", "--backend", "mock-remote", "--shots", "1200", "--model", str(tmp_path / "m.json")], tmp_path)
    rep = json.loads((tmp_path / "evaluate_summary.json").read_text())["report"]
    assert rep["meta"]["fidelity_model"]["c_2"] == -1e-3
    assert rep["n_total"] == pytest.approx(1200)


def test_report_empty_and_populated(tmp_path, capsys):
    run(["report"], tmp_path / "empty")
    assert "no runs" in capsys.readouterr().out
    run(["evaluate", "--code", "five_qubit", "--noise", "iso:0.01", "--exact"], tmp_path / "runs" / "ev")
    run(["learn", "--episodes", "4", "--agent", "random", "--max-qubits", "3"], tmp_path / "runs" / "learn")
    run(["report", "--runs", str(tmp_path / "runs")], tmp_path / "rep")
    rep = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert 5 in [r["n"] for r in rep["pnd_by_qubits"]]
    assert (tmp_path / "rep" / "pnd_vs_qubits.png").exists()


def test_jobs_show_and_replay(tmp_path, capsys):
    run(["evaluate", "--code", "trivial", "--noise", "iso:0.05", "--shots", "60"], tmp_path)
    job = json.loads((tmp_path / "evaluate_summary.json").read_text())["report"]["job_ids"][0]
    capsys.readouterr()
    run(["jobs", "show", job], tmp_path)
    assert json.loads(capsys.readouterr().out)["job_id"] == job
    run(["jobs", "replay", job], tmp_path)
    assert capsys.readouterr().out.startswith("# circuit")
    assert main(["jobs", "replay", "missing", "--out", str(tmp_path)]) == 2


def test_backends_list(capsys):
    assert main(["backends", "list"]) == 0
    assert "mock-remote" in capsys.readouterr().out


def test_bad_arguments_exit_nonzero(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--noise", "iso:0.01"])
    assert exc.value.code != 0
    assert main(["evaluate", "--code", "five_qubit", "--noise", "bogus:1", "--out", str(tmp_path)]) != 0
