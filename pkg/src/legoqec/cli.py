"""Command-line entry point: ``legoqec <command> ...``.

Every command writes a ``<command>_summary.json`` under ``--out``; evaluation jobs
go through a job store at ``<out>/jobs`` stamped with a logical clock, so a re-run
with the same arguments reproduces the data files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .backends import IntegrityError, JobStore, LocalTableauBackend, UnknownJobError, get_backend, list_backends
from .codes import CheckMatrix, bit_flip_code, five_qubit_code, steane_code, trivial_code
from .evaluator import (
    FidelityModel,
    evaluate,
    error_free_fraction,
    execute_protocol,
    fit_fidelity,
    shot_table_to_text,
)
from .learner import LearningConfig, run_learning
from .noise import NoiseModel
from .reports import build_report, channel_check, dump_json, plot_fit

log = logging.getLogger("legoqec")


def _noise(spec: str) -> NoiseModel:
    return NoiseModel.from_spec(spec)


def _model(args) -> FidelityModel | None:
    if getattr(args, "model", None):
        d = json.loads(Path(args.model).read_text())
        d = d.get("model", d)
        alpha = args.alpha if args.alpha is not None else d.get("alpha", 1.0)
        return FidelityModel(d["c_q"], d["c_1"], d["c_2"], alpha)
    return None


def cmd_learn(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "learn_summary.json"
    cfg = LearningConfig(
        max_qubits=args.max_qubits,
        shots=args.shots,
        noise=_noise(args.noise),
        agent=args.agent,
        episodes=args.episodes,
        seed=args.seed,
        exact_threshold=args.exact_threshold,
        bases=args.bases,
        fidelity_model=_model(args),
    )
    config_dump = {
        "max_qubits": cfg.max_qubits, "shots": cfg.shots, "noise": cfg.noise.to_spec(), "agent": cfg.agent,
        "episodes": cfg.episodes, "seed": cfg.seed, "exact_threshold": cfg.exact_threshold, "bases": cfg.bases,
        "fidelity_model": cfg.fidelity_model.to_dict() if cfg.fidelity_model else None,
    }
    if summary_path.exists():
        prev = json.loads(summary_path.read_text())
        if prev.get("config") == config_dump:
            print(f"learning run already complete in {out}")
            return 0
    log_path = out / "episodes.jsonl"
    tmp_log = out / "episodes.jsonl.tmp"
    tmp_log.unlink(missing_ok=True)
    res = run_learning(cfg, tmp_log)
    tmp_log.replace(log_path)
    codes_dir = out / "codes"
    codes_dir.mkdir(exist_ok=True)
    for n, (code, _) in res.by_qubits.items():
        code.save(codes_dir / f"best_n{n}.code")
    dump_json({"command": "learn", "config": config_dump, "result": res.summary()}, summary_path)
    best, p = res.best()
    print(f"best code: n={best.n} p_ND={p:.6g} ({len(res.ranking)} distinct codes, {cfg.episodes} episodes)")
    for n, (_, q) in sorted(res.by_qubits.items()):
        print(f"  n={n:2d}  p_ND={q:.6g}")
    return 0


_BUNDLED = ("five_qubit", "steane", "bit_flip", "trivial")


def _load_code(name: str) -> CheckMatrix:
    """A code file path, or the name of a file bundled in ``legoqec/data``."""
    if name in _BUNDLED:
        return CheckMatrix.from_text(resources.files("legoqec.data").joinpath(f"{name}.code").read_text())
    return CheckMatrix.load(name)


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    code = _load_code(args.code)
    store = JobStore(out / "jobs", clock="logical")
    if args.backend in ("tableau", "local-tableau"):
        backend = LocalTableauBackend(threads=args.threads) if not args.exact else get_backend("dense")
    else:
        backend = get_backend(args.backend)
    report = evaluate(
        code,
        _noise(args.noise),
        backend,
        shots=args.shots,
        seed=args.seed,
        bases=args.bases,
        exact=args.exact,
        model=_model(args),
        store=store,
        relaxation=args.relaxation,
    )
    (out / "shots.txt").write_text(shot_table_to_text(report.records))
    dump_json({"command": "evaluate", "report": report.to_dict()}, out / "evaluate_summary.json")
    print(f"p_ND = {report.p_nd:.12g}  (n={code.n}, total weight {report.n_total:.6g})")
    for s, row in report.tallies.items():
        print(f"  syndrome {s or '-'}: correction {row['correction']}  weight {row['total']:.6g}  uncorrected {row['uncorrected']:.6g}")
    return 0


def _calibration_runs(backend_name: str, shots: int, seed: int) -> list[list[float]]:
    """Noiseless protocol circuits of several sizes; error-free fraction per circuit."""
    backend = get_backend(backend_name)
    rows = []
    for i, code in enumerate([trivial_code(), bit_flip_code(), five_qubit_code(), steane_code()]):
        run = execute_protocol(code, NoiseModel.noiseless(), backend, shots, seed + i, "six")
        for (basis, sign), circ in run.circuits.items():
            group = [r for r in run.records if r.basis == basis and r.sign_in == sign]
            rows.append([*circ.counts, error_free_fraction(group)])
    return rows


def cmd_fit(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.runs:
        runs = [[float(t) for t in ln.replace(",", " ").split()] for ln in Path(args.runs).read_text().splitlines()
                if ln.strip() and not ln.lstrip().startswith("#")]
    else:
        runs = _calibration_runs(args.backend, args.shots, args.seed)
    model = fit_fidelity(runs, alpha=args.alpha if args.alpha is not None else 1.0)
    dump_json({"command": "fit", "runs": runs, "model": model.to_dict()}, out / "fit_summary.json")
    if not args.no_plots:
        plot_fit(runs, model.to_dict(), out / "fit_scatter.png")
    print(f"c_q={model.c_q:.6g} c_1={model.c_1:.6g} c_2={model.c_2:.6g} alpha={model.alpha} residual={model.residual:.3g}")
    return 0


def cmd_channel_check(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res = channel_check(args.delta)
    dump_json({"command": "channel-check", **res}, out / "channel_check_summary.json")
    for row in res["rows"]:
        print(f"delta={row['delta']:<5g} max Choi trace distance {row['max']:.3e}")
    print(f"max Choi trace distance {res['max_distance']:.3e}")
    return 0 if res["max_distance"] < 1e-10 else 1


def cmd_report(args) -> int:
    runs_dir = Path(args.runs or args.out)
    report = build_report(runs_dir, args.out, plots=not args.no_plots)
    if report is None:
        print(f"no runs found under {runs_dir}")
        return 0
    for row in report["pnd_by_qubits"]:
        print(f"n={row['n']:2d}  best p_ND={row['p_nd']:.6g}  ({row['source']})")
    return 0


def cmd_backends(args) -> int:
    rows = [d.summary() for d in list_backends()]
    for r in rows:
        print(f"{r['name']:14s} caps={','.join(r['capabilities'])} qubits<={r['qubit_cap']} {r['connectivity']}")
    return 0


def cmd_jobs(args) -> int:
    store = JobStore(Path(args.store or Path(args.out) / "jobs"))
    try:
        if args.action == "show":
            print(store.get(args.job_id).to_json())
            return 0
        res = store.replay(args.job_id)
    except UnknownJobError:
        print(f"unknown job {args.job_id}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(res.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="runs")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="legoqec", parents=[common], description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("learn", cmd_learn, "search for codes with the lego game")
    sp.add_argument("--noise", default="iso:0.01")
    sp.add_argument("--agent", default="mcts", choices=["mcts", "greedy-epsilon", "random"])
    sp.add_argument("--episodes", type=int, default=200)
    sp.add_argument("--max-qubits", type=int, default=10)
    sp.add_argument("--shots", type=int, default=20_000)
    sp.add_argument("--exact-threshold", type=int, default=10)
    sp.add_argument("--bases", default="six")
    sp.add_argument("--model", help="fit_summary.json for renormalized rewards")
    sp.add_argument("--alpha", type=float)

    sp = add("evaluate", cmd_evaluate, "run the protocol and compute p_ND")
    sp.add_argument("--code", required=True, help="code file or one of: " + ", ".join(_BUNDLED))
    sp.add_argument("--noise", required=True)
    sp.add_argument("--shots", type=int, default=10_000)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--backend", default="tableau")
    sp.add_argument("--bases", default="six")
    sp.add_argument("--relaxation", default="kraus", choices=["kraus", "gadget"])
    sp.add_argument("--model")
    sp.add_argument("--alpha", type=float)

    sp = add("fit", cmd_fit, "fit the gate-count fidelity model")
    sp.add_argument("--runs", help="rows of N_q N_1 N_2 fraction; omit to calibrate on a backend")
    sp.add_argument("--backend", default="mock-remote")
    sp.add_argument("--shots", type=int, default=60_000)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--no-plots", action="store_true")

    sp = add("channel-check", cmd_channel_check, "compare the relaxation constructions")
    sp.add_argument("--delta", type=float, nargs="+", default=[0.0, 0.1, 0.3, 0.5, 0.9, 1.0])

    sp = add("report", cmd_report, "summarise persisted runs")
    sp.add_argument("--runs", help="directory to scan (defaults to --out)")
    sp.add_argument("--no-plots", action="store_true")

    bp = sub.add_parser("backends", parents=[common], help="execution backends")
    bp.add_argument("action", choices=["list"])
    bp.set_defaults(func=cmd_backends)

    jp = sub.add_parser("jobs", parents=[common], help="inspect the job store")
    jp.add_argument("action", choices=["show", "replay"])
    jp.add_argument("job_id")
    jp.add_argument("--store", help="job store directory (defaults to <out>/jobs)")
    jp.set_defaults(func=cmd_jobs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
