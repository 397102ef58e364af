"""Execution backends and the on-disk job store.

Store layout under ``root``::

    index.jsonl              append-only job records (one JSON object per line)
    circuits/<sha256>.txt    circuit text, named by its digest
    results/<sha256>.txt     shot file or exact distribution, named by its digest
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from filelock import FileLock

from .circuits import CliffordCircuit
from .dense import DEFAULT_MAX_QUBITS, run_dense
from .layout import CouplingGraph, check_connectivity
from .noise import NoiseModel
from .results import ExecutionResult, OutcomeDistribution, result_digest
from .tableau import run_tableau


class BackendRejection(ValueError):
    pass


class IntegrityError(RuntimeError):
    pass


class UnknownJobError(KeyError):
    pass


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    capabilities: frozenset[str]
    qubit_cap: int
    connectivity: CouplingGraph | None = None  # None means all-to-all
    shots_per_sec: float = 1e5

    def __post_init__(self):
        if not self.capabilities:
            raise ValueError("a backend needs at least one capability")

    def summary(self) -> dict:
        return {
            "name": self.name,
            "capabilities": sorted(self.capabilities),
            "qubit_cap": self.qubit_cap,
            "connectivity": "all-to-all" if self.connectivity is None else self.connectivity.name,
            "shots_per_sec": self.shots_per_sec,
        }


def required_capabilities(circuit: CliffordCircuit, noise: NoiseModel, exact: bool) -> set[str]:
    needs = set()
    if any(g.kind in ("PSWAP", "DISCARD") for g in circuit.gates):
        needs.add("relaxation-gadget")
    if noise.has_relaxation or exact:
        needs.add("dense")
    return needs


class Backend:
    descriptor: BackendDescriptor

    @property
    def name(self) -> str:
        return self.descriptor.name

    def check(self, circuit: CliffordCircuit, noise: NoiseModel, exact: bool = False) -> None:
        d = self.descriptor
        missing = required_capabilities(circuit, noise, exact) - d.capabilities
        if missing:
            raise BackendRejection(f"{d.name} lacks capabilities: {', '.join(sorted(missing))}")
        if circuit.n_qubits > d.qubit_cap:
            raise BackendRejection(f"{d.name} accepts at most {d.qubit_cap} qubits")
        if d.connectivity is not None:
            bad = check_connectivity(circuit, d.connectivity)
            if bad:
                listing = "; ".join(g.to_text() for g in bad[:10])
                raise BackendRejection(f"{d.name}: {len(bad)} gate(s) off the coupling graph: {listing}")

    def execute(self, circuit, noise, shots, seed, exact=False, relaxation="kraus"):
        raise NotImplementedError


class LocalTableauBackend(Backend):
    def __init__(self, threads: int = 1, qubit_cap: int = 128):
        self.threads = threads
        self.descriptor = BackendDescriptor("local-tableau", frozenset({"clifford-only"}), qubit_cap)

    def execute(self, circuit, noise, shots, seed, exact=False, relaxation="kraus"):
        self.check(circuit, noise, exact)
        return run_tableau(circuit, noise, shots, seed, threads=self.threads)


class LocalDenseBackend(Backend):
    def __init__(self, max_qubits: int = DEFAULT_MAX_QUBITS, qubit_cap: int = 64):
        self.max_qubits = max_qubits
        self.descriptor = BackendDescriptor(
            "local-dense",
            frozenset({"clifford-only", "dense", "relaxation-gadget"}),
            qubit_cap,
            shots_per_sec=1e3,
        )

    def execute(self, circuit, noise, shots, seed, exact=False, relaxation="kraus"):
        self.check(circuit, noise, exact)
        return run_dense(circuit, noise, shots, seed, exact, relaxation, self.max_qubits)


class MockRemoteBackend(Backend):
    """Stand-in for a vendor device: injected latency and gate-count infidelity.

    ``coefficients = (c_q, c_1, c_2)`` are turned into depolarizing errors whose
    product fidelity is ``exp(c_q N_q + c_1 N_1 + c_2 N_2)``: ``1 - e^{c_q}`` at
    each qubit's preparation, ``1 - e^{c_1}`` after one-qubit gates and
    ``1 - e^{c_2/2}`` on each operand of a two-qubit gate.
    """

    def __init__(
        self,
        coefficients=(-1e-4, -1e-4, -1e-3),
        latency: float = 0.0,
        connectivity: CouplingGraph | None = None,
        max_qubits: int = DEFAULT_MAX_QUBITS,
        name: str = "mock-remote",
    ):
        self.coefficients = tuple(float(c) for c in coefficients)
        self.latency = latency
        self.max_qubits = max_qubits
        self.descriptor = BackendDescriptor(
            name,
            frozenset({"clifford-only", "dense", "relaxation-gadget"}),
            64,
            connectivity,
            shots_per_sec=50.0,
        )

    def device_noise(self, noise: NoiseModel) -> NoiseModel:
        cq, c1, c2 = self.coefficients
        return NoiseModel(
            noise.pauli,
            noise.per_qubit,
            noise.relaxation_delta,
            noise.placement,
            gate1=min(0.75, noise.gate1 + 1 - math.exp(c1)),
            gate2=min(0.75, noise.gate2 + 1 - math.exp(c2 / 2)),
            prep=min(0.75, noise.prep + 1 - math.exp(cq)),
        )

    def execute(self, circuit, noise, shots, seed, exact=False, relaxation="kraus"):
        self.check(circuit, noise, exact)
        if self.latency:
            time.sleep(self.latency)
        dev = self.device_noise(noise)
        if required_capabilities(circuit, noise, exact) - {"clifford-only"}:
            return run_dense(circuit, dev, shots, seed, exact, relaxation, self.max_qubits)
        return run_tableau(circuit, dev, shots, seed)


_FACTORIES: dict[str, Callable[[], Backend]] = {
    "local-tableau": LocalTableauBackend,
    "local-dense": LocalDenseBackend,
    "mock-remote": MockRemoteBackend,
}
ALIASES = {"tableau": "local-tableau", "dense": "local-dense"}


def get_backend(name: str | Backend) -> Backend:
    if isinstance(name, Backend):
        return name
    name = ALIASES.get(name, name)
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; known: {sorted(_FACTORIES)}") from None


def list_backends() -> list[BackendDescriptor]:
    return [f().descriptor for f in _FACTORIES.values()]


@dataclass
class JobRecord:
    job_id: str
    backend: str
    circuit_hash: str
    noise: str
    seed: int
    shots: int | None
    exact: bool
    relaxation: str = "kraus"
    status: str = "submitted"
    result_digest: str | None = None
    result_path: str | None = None
    submitted_at: float | None = None
    completed_at: float | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def job_id_for(backend: str, circuit_hash: str, noise: str, seed, shots, exact, relaxation) -> str:
    key = json.dumps([backend, circuit_hash, noise, seed, shots, bool(exact), relaxation])
    return hashlib.sha256(key.encode()).hexdigest()[:20]


class LogicalClock:
    """Deterministic stand-in for wall time: 0, 1, 2, ..."""

    def __init__(self, start: int = 0):
        self._it = itertools.count(start)

    def __call__(self) -> float:
        return float(next(self._it))


class JobStore:
    def __init__(self, root, clock: Callable[[], float] | None = None):
        self.root = Path(root)
        (self.root / "results").mkdir(parents=True, exist_ok=True)
        (self.root / "circuits").mkdir(parents=True, exist_ok=True)
        self.index = self.root / "index.jsonl"
        self._lock = FileLock(str(self.root / "index.lock"))
        if clock is None:
            clock = time.time
        elif clock == "logical":
            clock = LogicalClock(len(self._lines()))
        self.clock = clock

    def _lines(self) -> list[str]:
        if not self.index.exists():
            return []
        return [ln for ln in self.index.read_text().splitlines() if ln.strip()]

    def _append(self, record: JobRecord) -> None:
        with self._lock:
            with open(self.index, "a") as fh:
                fh.write(record.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def _write_atomic(self, path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)

    def records(self) -> dict[str, JobRecord]:
        """Latest record per job id, in first-submission order."""
        out: dict[str, JobRecord] = {}
        for ln in self._lines():
            rec = JobRecord(**json.loads(ln))
            out[rec.job_id] = rec
        return out

    def get(self, job_id: str) -> JobRecord:
        try:
            return self.records()[job_id]
        except KeyError:
            raise UnknownJobError(job_id) from None

    def circuit(self, record: JobRecord) -> CliffordCircuit:
        return CliffordCircuit.load(self.root / "circuits" / f"{record.circuit_hash}.txt")

    def submit(
        self,
        backend: Backend,
        circuit: CliffordCircuit,
        noise: NoiseModel,
        shots: int | None,
        seed: int,
        exact: bool = False,
        relaxation: str = "kraus",
        meta: dict | None = None,
    ) -> JobRecord:
        backend.check(circuit, noise, exact)
        chash = circuit.digest()
        jid = job_id_for(backend.name, chash, noise.to_spec(), seed, shots, exact, relaxation)
        existing = self.records().get(jid)
        if existing is not None and existing.status == "completed":
            try:
                self.replay(jid)
                return existing
            except IntegrityError:
                pass
        self._write_atomic(self.root / "circuits" / f"{chash}.txt", circuit.to_text())
        rec = JobRecord(jid, backend.name, chash, noise.to_spec(), seed, shots, exact, relaxation,
                        submitted_at=self.clock(), meta=dict(meta or {}))
        self._append(rec)
        result = backend.execute(circuit, noise, shots, seed, exact, relaxation)
        text = result.to_text()
        digest = result_digest(text)
        path = self.root / "results" / f"{digest}.txt"
        self._write_atomic(path, text)
        rec.status = "completed"
        rec.result_digest = digest
        rec.result_path = f"results/{digest}.txt"
        rec.completed_at = self.clock()
        self._append(rec)
        return rec

    def replay(self, job_id: str) -> ExecutionResult | OutcomeDistribution:
        rec = self.get(job_id)
        if rec.status != "completed" or rec.result_path is None:
            raise IntegrityError(f"job {job_id} has no completed result")
        path = self.root / rec.result_path
        if not path.exists():
            raise IntegrityError(f"result file for job {job_id} is missing")
        text = path.read_text()
        if result_digest(text) != rec.result_digest:
            raise IntegrityError(f"result file for job {job_id} fails its hash check")
        if rec.exact:
            return OutcomeDistribution.from_text(text)
        return ExecutionResult.from_text(text)


def submit(backend, circuit, noise, shots, seed, store: JobStore, **kw) -> JobRecord:
    return store.submit(get_backend(backend), circuit, noise, shots, seed, **kw)


def replay(store: JobStore, job_id: str):
    return store.replay(job_id)
