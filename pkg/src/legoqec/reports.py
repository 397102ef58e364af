"""Report tables and static plots built from persisted run files.

The JSON/text files are the record; PNGs are derived views.
"""

from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import numpy as np

from .channels import amplitude_damping, channel_from_eq4, choi_trace_distance, gadget_channel, gamma_from_delta

DEFAULT_DELTAS = (0.0, 0.1, 0.3, 0.5, 0.9, 1.0)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def channel_check(deltas=DEFAULT_DELTAS) -> dict:
    """Pairwise Choi trace distances between the three relaxation constructions."""
    rows = []
    for d in deltas:
        chans = {"map": channel_from_eq4(d), "gadget": gadget_channel(d), "amp_damp": amplitude_damping(gamma_from_delta(d))}
        dist = {f"{a}-{b}": choi_trace_distance(chans[a], chans[b]) for a, b in combinations(chans, 2)}
        rows.append({"delta": float(d), "distances": dist, "max": max(dist.values())})
    return {"rows": rows, "max_distance": max(r["max"] for r in rows)}


def collect_runs(root) -> dict:
    """Scan ``root`` for learning and evaluation summaries."""
    root = Path(root)
    learn, evals = [], []
    if root.exists():
        for path in sorted(root.rglob("learn_summary.json")):
            learn.append((path, json.loads(path.read_text())))
        for path in sorted(root.rglob("evaluate_summary.json")):
            evals.append((path, json.loads(path.read_text())))
    return {"learn": learn, "evaluate": evals}


def pnd_by_qubits(runs: dict, root=None) -> list[dict]:
    """Best p_ND per physical qubit count across all runs."""
    best: dict[int, dict] = {}

    def offer(n, p, source):
        if n not in best or p < best[n]["p_nd"]:
            best[n] = {"n": n, "p_nd": p, "source": source}

    rel = (lambda p: str(Path(p).relative_to(root))) if root is not None else str
    for path, summary in runs["learn"]:
        for n, row in summary["result"]["by_qubits"].items():
            offer(int(n), row["p_nd"], rel(path))
    for path, summary in runs["evaluate"]:
        rep = summary["report"]
        offer(int(rep["meta"]["n"]), rep["p_nd"], rel(path))
    return [best[n] for n in sorted(best)]


def _savefig(fig, path) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": None})


def plot_pnd_vs_qubits(rows: list[dict], path, baseline: float | None = None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r["n"] for r in rows], [r["p_nd"] for r in rows], "o-", label="best code")
    if baseline is not None:
        ax.axhline(baseline, color="gray", ls="--", label="bare qubit")
    ax.set_xlabel("physical qubits")
    ax.set_ylabel("p_ND")
    ax.legend()
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)


def plot_fit(runs, model, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.asarray(runs, dtype=float)
    pred = data[:, :3] @ np.array([model["c_q"], model["c_1"], model["c_2"]])
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.scatter(pred, np.log(data[:, 3]), s=12)
    lo, hi = min(pred.min(), np.log(data[:, 3]).min()), max(pred.max(), 0.0)
    ax.plot([lo, hi], [lo, hi], color="gray", lw=0.8)
    ax.set_xlabel("predicted log F")
    ax.set_ylabel("observed log fraction")
    fig.tight_layout()
    _savefig(fig, path)
    plt.close(fig)


def build_report(root, out=None, plots: bool = True) -> dict | None:
    """Per-qubit-count summary of everything under ``root``; ``None`` when there are no runs."""
    root = Path(root)
    runs = collect_runs(root)
    if not runs["learn"] and not runs["evaluate"]:
        return None
    rows = pnd_by_qubits(runs, root)
    report = {"pnd_by_qubits": rows, "n_learn_runs": len(runs["learn"]), "n_evaluations": len(runs["evaluate"])}
    fit_path = next(iter(sorted(root.rglob("fit_summary.json"))), None)
    if fit_path is not None:
        fit = json.loads(fit_path.read_text())
        report["fit"] = fit["model"]
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        dump_json(report, out / "report.json")
        if plots:
            plot_pnd_vs_qubits(rows, out / "pnd_vs_qubits.png")
            if fit_path is not None:
                plot_fit(fit["runs"], fit["model"], out / "fit_scatter.png")
    return report
