"""Protocol runs, syndrome-table decoding, p_ND, fidelity fitting and shot renormalization.

One protocol run prepares ``sign * P`` (``P`` in X, Y, Z) in the code, applies a
noise layer, measures every stabilizer and finally the logical ``P``.  Records
are aggregated: a :class:`ShotRecord` with weight ``w`` stands for ``w`` runs.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .backends import Backend, BackendRejection, JobStore, MockRemoteBackend, get_backend
from .circuits import CliffordCircuit, Gate
from .codes import CheckMatrix
from .layout import CouplingGraph, place_ancillas, route_circuit
from .noise import NoiseModel
from .results import ExecutionResult, OutcomeDistribution
from .synthesis import relaxation_gadget, synthesize_encoder, synthesize_syndrome_extraction

PAULI_ORDER = ("I", "X", "Y", "Z")
SIX_STATES = (("X", 1), ("X", -1), ("Y", 1), ("Y", -1), ("Z", 1), ("Z", -1))
FIG4_STATES = (("X", 1), ("Y", 1), ("Z", 1))


class ConfigurationError(ValueError):
    pass


class UndefinedRateError(ValueError):
    pass


class IdentifiabilityError(ValueError):
    pass


class FidelityDomainError(ValueError):
    pass


class SaturationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ShotRecord:
    basis: str
    sign_in: int
    syndrome: str
    sign_out: int
    weight: float = 1.0

    @property
    def error_free(self) -> bool:
        return self.sign_out == self.sign_in and "1" not in self.syndrome

    def reweighted(self, weight: float) -> "ShotRecord":
        return ShotRecord(self.basis, self.sign_in, self.syndrome, self.sign_out, weight)


def anticommutes(a: str, b: str) -> bool:
    """Single-qubit Pauli letters."""
    return a != "I" and b != "I" and a != b


def is_fixed(record: ShotRecord, correction: str) -> bool:
    flip = -1 if anticommutes(correction, record.basis) else 1
    return record.sign_out * flip == record.sign_in


def parse_bases(spec) -> tuple[tuple[str, int], ...]:
    """``"six"``, ``"fig4"``, ``"+X,-Z"`` or a sequence of ``(basis, sign)`` pairs."""
    if spec is None or spec == "six":
        return SIX_STATES
    if spec == "fig4":
        return FIG4_STATES
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    out = []
    for item in spec:
        if isinstance(item, str):
            sign = -1 if item[0] == "-" else 1
            basis = item.lstrip("+-")
        else:
            basis, sign = item
        if basis not in ("X", "Y", "Z") or sign not in (1, -1):
            raise ConfigurationError(f"bad preparation {item!r}")
        out.append((basis, int(sign)))
    if not out:
        raise ConfigurationError("no preparation bases given")
    return tuple(out)


# --------------------------------------------------------------------------- circuits


def protocol_circuit(
    code: CheckMatrix,
    basis: str,
    sign: int = 1,
    reuse_ancilla: bool = False,
    layout: CouplingGraph | None = None,
    placement: Sequence[int] | None = None,
    gadget_delta: float | None = None,
) -> CliffordCircuit:
    """Encoder, NOISE markers on the data, stabilizer checks, logical readout.

    Measurement order: one bit per stabilizer, then the readout bit.
    ``gadget_delta`` appends an explicit relaxation gadget after each marker,
    using one extra auxiliary qubit.
    """
    n = code.n
    readout = code.logical(basis)
    ext = synthesize_syndrome_extraction(code, readout=readout.unsigned(), reuse_ancilla=reuse_ancilla)
    width = ext.n_qubits + (1 if gadget_delta is not None else 0)
    gates: list[Gate] = list(synthesize_encoder(code, basis, sign).gates)
    for q in range(n):
        gates.append(Gate("NOISE", (q,)))
        if gadget_delta is not None:
            gates += relaxation_gadget(gadget_delta, [q], width - 1, width).gates
    gates += ext.gates
    circ = CliffordCircuit(width, tuple(gates))
    if layout is not None and not layout.all_to_all:
        data = list(placement) if placement is not None else list(range(n))
        checks = list(code.stabilizers) + [readout]
        n_anc = ext.n_qubits - n
        extra = place_ancillas(layout, data, checks[:n_anc] if not reuse_ancilla else checks[:1])
        if gadget_delta is not None:
            extra += place_ancillas(layout, data + extra, [readout.unsigned()])
        circ = route_circuit(circ, layout, data + extra)
    return circ


def decode_bits(code: CheckMatrix, basis: str, bits: Sequence[int]) -> tuple[str, int]:
    """(syndrome string, p_out) from one measurement record."""
    flags = [1 if s.sign < 0 else 0 for s in code.stabilizers]
    m = len(flags)
    syndrome = "".join(str(int(bits[i]) ^ flags[i]) for i in range(m))
    p_out = code.logical(basis).sign * (-1 if bits[m] else 1)
    return syndrome, p_out


def records_from_result(
    code: CheckMatrix,
    basis: str,
    sign: int,
    result: ExecutionResult | OutcomeDistribution,
    scale: float = 1.0,
) -> list[ShotRecord]:
    tally: dict[tuple[str, int], float] = defaultdict(float)
    if isinstance(result, OutcomeDistribution):
        items = result.probs.items()
    else:
        items = result.counts().items()
    for bits, w in items:
        tally[decode_bits(code, basis, bits)] += w * scale
    return [ShotRecord(basis, sign, s, p, w) for (s, p), w in sorted(tally.items()) if w > 0]


# --------------------------------------------------------------------------- running


def _uses_dense(backend: Backend, noise: NoiseModel, exact: bool) -> bool:
    return exact or noise.has_relaxation or backend.name == "local-dense"


def _split_shots(shots: int | None, k: int) -> list[int | None]:
    if shots is None:
        return [None] * k
    base, extra = divmod(int(shots), k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def _basis_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), index]).generate_state(1)[0])


@dataclass
class ProtocolRun:
    """Per-basis circuits, records and (optional) job ids of one protocol execution."""

    records: list[ShotRecord]
    circuits: dict[tuple[str, int], CliffordCircuit]
    job_ids: list[str] = field(default_factory=list)


def execute_protocol(
    code: CheckMatrix,
    noise: NoiseModel,
    engine: str | Backend = "tableau",
    shots: int | None = 10_000,
    seed: int = 0,
    bases="six",
    exact: bool = False,
    store: JobStore | None = None,
    relaxation: str = "kraus",
    reuse_ancilla: bool | None = None,
    layout: CouplingGraph | None = None,
    placement: Sequence[int] | None = None,
    explicit_gadget: bool = False,
) -> ProtocolRun:
    code.validate()
    if code.k != 1:
        raise ConfigurationError("the protocol needs exactly one logical qubit")
    backend = get_backend(engine)
    states = parse_bases(bases)
    if not exact and (shots is None or shots < len(states)):
        raise ConfigurationError("sampling needs at least one shot per preparation")
    if reuse_ancilla is None:
        gate_noise = noise.has_gate_noise or isinstance(backend, MockRemoteBackend)
        reuse_ancilla = _uses_dense(backend, noise, exact) and (gate_noise or noise.placement == "per_gate")
    gadget_delta = None
    run_noise = noise
    if explicit_gadget and noise.has_relaxation:
        gadget_delta = noise.relaxation_delta
        run_noise = noise.without_relaxation()
    if layout is None and backend.descriptor.connectivity is not None:
        layout = backend.descriptor.connectivity

    run = ProtocolRun([], {})
    for idx, ((basis, sign), n_shots) in enumerate(zip(states, _split_shots(shots, len(states)))):
        circ = protocol_circuit(code, basis, sign, reuse_ancilla, layout, placement, gadget_delta)
        run.circuits[(basis, sign)] = circ
        s = _basis_seed(seed, idx)
        try:
            if store is not None:
                meta = {"basis": basis, "sign": sign, "code": code.to_text(), "counts": list(circ.counts)}
                rec = store.submit(backend, circ, run_noise, n_shots, s, exact, relaxation, meta)
                run.job_ids.append(rec.job_id)
                result = store.replay(rec.job_id)
            else:
                result = backend.execute(circ, run_noise, n_shots, s, exact, relaxation)
        except BackendRejection as exc:
            raise ConfigurationError(str(exc)) from exc
        scale = float(n_shots) if exact and n_shots is not None else 1.0
        run.records += records_from_result(code, basis, sign, result, scale)
    return run


def run_protocol(code, noise, engine="tableau", shots=10_000, seed=0, bases="six", exact=False, **kw) -> list[ShotRecord]:
    """Records for each preparation in ``bases``; see :func:`execute_protocol`."""
    return execute_protocol(code, noise, engine, shots, seed, bases, exact, **kw).records


# --------------------------------------------------------------------------- decoding


@dataclass(frozen=True)
class CorrectionTable:
    corrections: dict[str, str]

    def __getitem__(self, syndrome: str) -> str:
        return self.corrections.get(syndrome, "I")

    def to_dict(self) -> dict[str, str]:
        return dict(sorted(self.corrections.items()))


def fixed_weights(records: Iterable[ShotRecord]) -> dict[str, dict[str, float]]:
    """Per syndrome, weighted count of records each candidate correction would fix."""
    out: dict[str, dict[str, float]] = defaultdict(lambda: dict.fromkeys(PAULI_ORDER, 0.0))
    for r in records:
        row = out[r.syndrome]
        for p in PAULI_ORDER:
            if is_fixed(r, p):
                row[p] += r.weight
    return dict(out)


def build_correction_table(records: Iterable[ShotRecord], rtol: float = 1e-12) -> CorrectionTable:
    """Per syndrome the Pauli fixing the most weight; near-ties go to the earliest of I, X, Y, Z."""
    table = {}
    for s, row in fixed_weights(records).items():
        best = max(row.values())
        tol = rtol * max(1.0, abs(best))
        table[s] = next(p for p in PAULI_ORDER if row[p] >= best - tol)
    return CorrectionTable(table)


@dataclass
class EvalReport:
    p_nd: float
    n_total: float
    n_uncorrected: float
    n_error_free: float
    table: dict[str, str]
    tallies: dict[str, dict]
    job_ids: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    records: list[ShotRecord] = field(default_factory=list, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "p_nd": self.p_nd,
            "n_total": self.n_total,
            "n_uncorrected": self.n_uncorrected,
            "n_error_free": self.n_error_free,
            "table": self.table,
            "tallies": self.tallies,
            "job_ids": self.job_ids,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls(**json.loads(text))


def compute_pnd(records: Sequence[ShotRecord], table: CorrectionTable) -> EvalReport:
    total = sum(r.weight for r in records)
    if not records or total <= 0:
        raise UndefinedRateError("p_ND is undefined without weighted records")
    tallies: dict[str, dict] = {}
    bad = 0.0
    for s, row in sorted(fixed_weights(records).items()):
        n_s = sum(r.weight for r in records if r.syndrome == s)
        p = table[s]
        unc = n_s - row[p]
        bad += unc
        tallies[s] = {"correction": p, "total": n_s, "uncorrected": unc, "fixed_by": row}
    n0 = sum(r.weight for r in records if r.error_free)
    return EvalReport(bad / total, total, bad, n0, table.to_dict(), tallies, records=list(records))


def evaluate_records(records: Sequence[ShotRecord]) -> EvalReport:
    return compute_pnd(records, build_correction_table(records))


# --------------------------------------------------------------------------- fidelity


@dataclass(frozen=True)
class FidelityModel:
    c_q: float
    c_1: float
    c_2: float
    alpha: float = 1.0
    residual: float = 0.0

    def log_fidelity(self, counts: Sequence[int]) -> float:
        nq, n1, n2 = counts
        return self.c_q * nq + self.c_1 * n1 + self.c_2 * n2

    def fidelity(self, counts: Sequence[int]) -> float:
        return math.exp(self.log_fidelity(counts))

    def to_dict(self) -> dict:
        return {"c_q": self.c_q, "c_1": self.c_1, "c_2": self.c_2, "alpha": self.alpha, "residual": self.residual}


def fit_fidelity(runs: Sequence[Sequence[float]], alpha: float = 1.0) -> FidelityModel:
    """Least squares of ``log(fraction)`` on ``(N_q, N_1, N_2)`` with no intercept."""
    data = np.asarray(runs, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError("runs must be rows of (N_q, N_1, N_2, fraction)")
    a, frac = data[:, :3], data[:, 3]
    if len(data) < 3 or np.linalg.matrix_rank(a) < 3:
        raise IdentifiabilityError("need three linearly independent (N_q, N_1, N_2) rows")
    if np.any(frac <= 0) or np.any(frac > 1):
        raise FidelityDomainError("error-free fractions must lie in (0, 1]")
    y = np.log(frac)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = float(np.linalg.norm(a @ coef - y))
    return FidelityModel(*(float(c) for c in coef), alpha=alpha, residual=resid)


def error_free_fraction(records: Sequence[ShotRecord]) -> float:
    total = sum(r.weight for r in records)
    if total <= 0:
        raise UndefinedRateError("no weighted records")
    return sum(r.weight for r in records if r.error_free) / total


def renormalize(
    records: Sequence[ShotRecord],
    model: FidelityModel,
    circuit_counts: Sequence[int],
    n_tot: float | None = None,
) -> list[ShotRecord]:
    """Scale error-free weights by ``F^-alpha`` and the rest to keep the total fixed."""
    total = sum(r.weight for r in records)
    n_tot = total if n_tot is None else float(n_tot)
    if not math.isclose(n_tot, total, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError("n_tot must equal the weighted record total")
    n0 = sum(r.weight for r in records if r.error_free)
    f = model.fidelity(circuit_counts) ** model.alpha
    up = 1.0 / f
    if math.isclose(up, 1.0, rel_tol=0, abs_tol=1e-15):
        return list(records)
    if n0 >= n_tot:
        warnings.warn("every record is error-free; weights left unchanged", SaturationWarning, stacklevel=2)
        return list(records)
    if n0 == 0:
        return list(records)
    if n0 * up > n_tot:
        warnings.warn(
            "renormalized error-free weight exceeds the total; clamping other weights to zero",
            SaturationWarning,
            stacklevel=2,
        )
        up, down = n_tot / n0, 0.0
    else:
        down = (n_tot - n0 * up) / (n_tot - n0)
    return [r.reweighted(r.weight * (up if r.error_free else down)) for r in records]


def renormalize_run(run: ProtocolRun, model: FidelityModel) -> list[ShotRecord]:
    """Renormalize each preparation's records with its own circuit's predicted fidelity."""
    out = []
    for (basis, sign), circ in run.circuits.items():
        group = [r for r in run.records if r.basis == basis and r.sign_in == sign]
        if group:
            out += renormalize(group, model, circ.counts)
    return out


# --------------------------------------------------------------------------- pipeline


def evaluate(
    code: CheckMatrix,
    noise: NoiseModel,
    engine: str | Backend = "tableau",
    shots: int | None = 10_000,
    seed: int = 0,
    bases="six",
    exact: bool = False,
    model: FidelityModel | None = None,
    store: JobStore | None = None,
    **kw,
) -> EvalReport:
    run = execute_protocol(code, noise, engine, shots, seed, bases, exact, store, **kw)
    records = renormalize_run(run, model) if model is not None else run.records
    report = evaluate_records(records)
    report.job_ids = list(run.job_ids)
    report.meta = {
        "n": code.n,
        "k": code.k,
        "noise": noise.to_spec(),
        "engine": get_backend(engine).name,
        "shots": shots,
        "seed": seed,
        "exact": exact,
        "bases": ["%s%s" % ("+" if s > 0 else "-", b) for b, s in parse_bases(bases)],
    }
    if model is not None:
        report.meta["fidelity_model"] = model.to_dict()
    return report


def evaluate_from_store(store: JobStore, job_ids: Sequence[str], model: FidelityModel | None = None) -> EvalReport:
    """Rebuild a report from persisted job records alone."""
    records = []
    for jid in job_ids:
        rec = store.get(jid)
        code = CheckMatrix.from_text(rec.meta["code"])
        basis, sign = rec.meta["basis"], rec.meta["sign"]
        result = store.replay(jid)
        scale = float(rec.shots) if rec.exact and rec.shots is not None else 1.0
        group = records_from_result(code, basis, sign, result, scale)
        if model is not None:
            group = renormalize(group, model, rec.meta["counts"])
        records += group
    report = evaluate_records(records)
    report.job_ids = list(job_ids)
    return report


# --------------------------------------------------------------------------- shot tables


def _fmt_sign(s: int) -> str:
    return "+" if s > 0 else "-"


def shot_table_to_text(records: Iterable[ShotRecord]) -> str:
    """``basis sign_in syndrome sign_out weight``; an empty syndrome is written ``.``."""
    lines = ["# basis sign_in syndrome sign_out weight"]
    for r in records:
        lines.append(f"{r.basis} {_fmt_sign(r.sign_in)} {r.syndrome or '.'} {_fmt_sign(r.sign_out)} {r.weight!r}")
    return "\n".join(lines) + "\n"


def shot_table_from_text(text: str) -> list[ShotRecord]:
    out = []
    for ln in text.splitlines():
        tok = ln.split()
        if not tok or tok[0].startswith("#"):
            continue
        if len(tok) != 5:
            raise ValueError(f"bad shot-table line: {ln!r}")
        basis, si, syn, so, w = tok
        syn = "" if syn == "." else syn
        out.append(ShotRecord(basis, 1 if si == "+" else -1, syn, 1 if so == "+" else -1, float(w)))
    return out
