"""Gate-list circuits, their text format, and Clifford conjugation of Paulis."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .pauli import PauliOperator, multiply

ONE_QUBIT = {"H", "S", "SDG", "X", "Y", "Z"}
TWO_QUBIT = {"CX", "CZ", "SWAP", "PSWAP"}
NON_UNITARY = {"MEASURE_Z", "RESET", "DISCARD", "NOISE"}
GATE_KINDS = ONE_QUBIT | TWO_QUBIT | NON_UNITARY
CLIFFORD = ONE_QUBIT | {"CX", "CZ", "SWAP"}
ARITY = {**{g: 1 for g in ONE_QUBIT | NON_UNITARY}, **{g: 2 for g in TWO_QUBIT}}

INVERSE = {"H": "H", "S": "SDG", "SDG": "S", "X": "X", "Y": "Y", "Z": "Z",
           "CX": "CX", "CZ": "CZ", "SWAP": "SWAP"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate {self.kind!r}")
        if len(self.qubits) != ARITY[self.kind]:
            raise CircuitError(f"{self.kind} takes {ARITY[self.kind]} operand(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} operands must be distinct")
        if (self.kind == "PSWAP") != (self.param is not None):
            raise CircuitError("only PSWAP carries a parameter")

    def to_text(self) -> str:
        parts = [self.kind, *map(str, self.qubits)]
        if self.param is not None:
            parts.append(repr(float(self.param)))
        return " ".join(parts)


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list.  ``PSWAP`` and ``DISCARD`` only appear in relaxation gadgets."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise CircuitError(f"{g.to_text()} outside a {self.n_qubits}-qubit register")

    @property
    def counts(self) -> tuple[int, int, int]:
        """``(N_q, N_1, N_2)``: qubits, one-qubit gates, two-qubit gates."""
        n1 = sum(g.kind in ONE_QUBIT for g in self.gates)
        n2 = sum(g.kind in TWO_QUBIT for g in self.gates)
        return self.n_qubits, n1, n2

    @property
    def n_measurements(self) -> int:
        return sum(g.kind == "MEASURE_Z" for g in self.gates)

    @property
    def is_clifford(self) -> bool:
        return all(g.kind in CLIFFORD or g.kind in {"MEASURE_Z", "RESET", "NOISE"} for g in self.gates)

    def append(self, kind: str, *qubits: int, param: float | None = None) -> "CliffordCircuit":
        return CliffordCircuit(self.n_qubits, self.gates + (Gate(kind, qubits, param),))

    def extend(self, gates: Iterable[Gate]) -> "CliffordCircuit":
        return CliffordCircuit(self.n_qubits, self.gates + tuple(gates))

    def __add__(self, other: "CliffordCircuit") -> "CliffordCircuit":
        return CliffordCircuit(max(self.n_qubits, other.n_qubits), self.gates + other.gates)

    def widen(self, n_qubits: int) -> "CliffordCircuit":
        return CliffordCircuit(max(n_qubits, self.n_qubits), self.gates)

    def remap(self, mapping: Sequence[int], n_qubits: int) -> "CliffordCircuit":
        return CliffordCircuit(
            n_qubits, tuple(Gate(g.kind, [mapping[q] for q in g.qubits], g.param) for g in self.gates)
        )

    def inverse(self) -> "CliffordCircuit":
        try:
            gates = [Gate(INVERSE[g.kind], g.qubits) for g in reversed(self.gates)]
        except KeyError as exc:
            raise CircuitError(f"cannot invert {exc.args[0]}") from None
        return CliffordCircuit(self.n_qubits, tuple(gates))

    def two_qubit_pairs(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates if g.kind in TWO_QUBIT]

    def to_text(self) -> str:
        return f"QUBITS {self.n_qubits}\n" + "".join(g.to_text() + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        n = None
        gates = []
        for line in text.splitlines():
            tok = line.split()
            if not tok or tok[0].startswith("#"):
                continue
            if tok[0] == "QUBITS":
                n = int(tok[1])
                continue
            kind = tok[0]
            arity = ARITY.get(kind)
            if arity is None:
                raise CircuitError(f"unknown gate {kind!r}")
            qubits = [int(t) for t in tok[1 : 1 + arity]]
            param = float(tok[1 + arity]) if len(tok) > 1 + arity else None
            gates.append(Gate(kind, qubits, param))
        if n is None:
            n = 1 + max((q for g in gates for q in g.qubits), default=-1)
        return cls(n, tuple(gates))

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CliffordCircuit":
        return cls.from_text(Path(path).read_text())


# Images of X_j and Z_j (local qubit j) under U P U^dagger.
_IMAGES = {
    "H": {("X", 0): "+Z", ("Z", 0): "+X"},
    "S": {("X", 0): "+Y", ("Z", 0): "+Z"},
    "SDG": {("X", 0): "-Y", ("Z", 0): "+Z"},
    "X": {("X", 0): "+X", ("Z", 0): "-Z"},
    "Y": {("X", 0): "-X", ("Z", 0): "-Z"},
    "Z": {("X", 0): "-X", ("Z", 0): "+Z"},
    "CX": {("X", 0): "+XX", ("Z", 0): "+ZI", ("X", 1): "+IX", ("Z", 1): "+ZZ"},
    "CZ": {("X", 0): "+XZ", ("Z", 0): "+ZI", ("X", 1): "+ZX", ("Z", 1): "+IZ"},
    "SWAP": {("X", 0): "+IX", ("Z", 0): "+IZ", ("X", 1): "+XI", ("Z", 1): "+ZI"},
}
_IMAGE_OPS = {
    g: {key: PauliOperator.from_str(s) for key, s in table.items()} for g, table in _IMAGES.items()
}


def conjugate(p: PauliOperator, gate: Gate) -> PauliOperator:
    """``U p U^dagger`` for a Clifford gate, exact in sign."""
    table = _IMAGE_OPS.get(gate.kind)
    if table is None:
        raise CircuitError(f"{gate.kind} is not a Clifford unitary")
    qs = gate.qubits
    local = p.restrict(qs)
    if local.is_identity:
        return p
    mask = sum(1 << q for q in qs)
    out = PauliOperator(p.n, p.x & ~mask, p.z & ~mask, p.phase)
    image = PauliOperator.identity(len(qs))
    for j in range(len(qs)):
        xb, zb = local.x >> j & 1, local.z >> j & 1
        if xb and zb:  # Y = i X Z
            factor = multiply(table[("X", j)], table[("Z", j)]).times_i()
        elif xb:
            factor = table[("X", j)]
        elif zb:
            factor = table[("Z", j)]
        else:
            continue
        image = multiply(image, factor)
    return multiply(out, image.embed(p.n, qs))


def conjugate_circuit(p: PauliOperator, gates: Iterable[Gate]) -> PauliOperator:
    for g in gates:
        p = conjugate(p, g)
    return p


def heisenberg_back(p: PauliOperator, gates: Sequence[Gate]) -> PauliOperator:
    """``U^dagger p U`` where ``U`` applies ``gates`` in order."""
    for g in reversed(gates):
        p = conjugate(p, Gate(INVERSE[g.kind], g.qubits))
    return p


def partial_swap_theta(delta: float) -> float:
    return math.asin(math.sqrt(delta / 2.0))
