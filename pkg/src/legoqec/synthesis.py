"""Encoder and syndrome-extraction circuits for stabilizer codes."""

from __future__ import annotations

from typing import Sequence

from .circuits import CliffordCircuit, Gate, conjugate, partial_swap_theta
from .codes import CheckMatrix
from .pauli import PauliOperator, multiply

BASES = ("X", "Y", "Z")


def state_generators(code: CheckMatrix, basis: str, sign: int = 1) -> list[PauliOperator]:
    """Stabilizers plus ``sign * logical(basis)``: a full set for the prepared codeword (k = 1)."""
    if code.k != 1:
        raise ValueError("logical state preparation needs exactly one logical qubit")
    logical = code.logical(basis)
    if sign < 0:
        logical = logical.negate()
    return list(code.stabilizers) + [logical]


def prepare_stabilizer_state(generators: Sequence[PauliOperator]) -> CliffordCircuit:
    """Clifford circuit taking ``|0...0>`` to the state stabilized by ``generators``.

    Gaussian elimination under conjugation: each step picks an unfinished qubit,
    collapses one generator onto ``X`` there (H/SDG then CX fan-in), clears
    that column from the other generators by row multiplication, and rotates it
    to ``+Z``.  The encoder is the inverse of the accumulated gate list.
    """
    rows = list(generators)
    n = rows[0].n
    if len(rows) != n:
        raise ValueError("need n independent generators for an n-qubit state")
    gates: list[Gate] = []

    def apply(kind: str, *qs: int) -> None:
        g = Gate(kind, qs)
        gates.append(g)
        for i, r in enumerate(rows):
            rows[i] = conjugate(r, g)

    finished: set[int] = set()
    for i in range(n):
        # pick the next generator with support on an unfinished qubit
        j = next(j for j in range(i, n) if any(q not in finished for q in rows[j].support))
        rows[i], rows[j] = rows[j], rows[i]
        row = rows[i]
        q = next(q for q in row.support if q not in finished)
        for t in [q] + [t for t in row.support if t != q and t not in finished]:
            letter = rows[i].letter(t)
            if letter == "Z":
                apply("H", t)
            elif letter == "Y":
                apply("SDG", t)
            if t != q:
                apply("CX", q, t)
        for j in range(n):
            if j != i and rows[j].x >> q & 1:
                rows[j] = multiply(rows[j], rows[i])
        apply("H", q)
        if rows[i].sign < 0:
            apply("X", q)
        finished.add(q)
    return CliffordCircuit(n, tuple(gates)).inverse()


def synthesize_encoder(code: CheckMatrix, basis: str, sign: int = 1) -> CliffordCircuit:
    """Circuit mapping ``|0...0>`` to the codeword stabilized by ``sign * logical(basis)``."""
    code.validate()
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    return prepare_stabilizer_state(state_generators(code, basis, sign))


def measure_pauli(p: PauliOperator, ancilla: int, n_qubits: int) -> list[Gate]:
    """Gates measuring the unsigned ``p`` into ``ancilla`` (outcome 1 means eigenvalue -1)."""
    gates: list[Gate] = []
    support = p.support
    if p.x == 0:
        gates += [Gate("CX", (q, ancilla)) for q in support]
    else:
        gates.append(Gate("H", (ancilla,)))
        for q in support:
            letter = p.letter(q)
            if letter == "X":
                gates.append(Gate("CX", (ancilla, q)))
            elif letter == "Z":
                gates.append(Gate("CZ", (ancilla, q)))
            else:
                gates += [Gate("SDG", (q,)), Gate("CX", (ancilla, q)), Gate("S", (q,))]
        gates.append(Gate("H", (ancilla,)))
    return gates


def synthesize_syndrome_extraction(
    code: CheckMatrix,
    layout=None,
    readout: PauliOperator | None = None,
    reuse_ancilla: bool = False,
) -> CliffordCircuit:
    """One ancilla per stabilizer (plus one for ``readout``), all measured at the end.

    Data qubits are ``0..n-1``.  ``reuse_ancilla`` instead measures and resets a
    single ancilla after each check, which keeps the dense register small.  With a
    constrained ``layout`` the circuit is placed and routed onto it (see
    :func:`legoqec.layout.route_circuit`).
    """
    n = code.n
    checks = list(code.stabilizers) + ([readout] if readout is not None else [])
    if reuse_ancilla:
        anc = n
        gates: list[Gate] = []
        for p in checks:
            gates += measure_pauli(p, anc, n + 1)
            gates.append(Gate("MEASURE_Z", (anc,)))
            gates.append(Gate("RESET", (anc,)))
        circ = CliffordCircuit(n + 1, tuple(gates))
    else:
        gates = []
        for i, p in enumerate(checks):
            gates += measure_pauli(p, n + i, n + len(checks))
        gates += [Gate("MEASURE_Z", (n + i,)) for i in range(len(checks))]
        circ = CliffordCircuit(n + len(checks), tuple(gates))
    if layout is not None and not layout.all_to_all:
        from .layout import place_ancillas, route_circuit

        data = list(range(n))
        ancillas = place_ancillas(layout, data, checks[:1] if reuse_ancilla else checks)
        circ = route_circuit(circ, layout, data + ancillas)
    return circ


def relaxation_gadget(delta: float, targets: Sequence[int], aux: int, n_qubits: int | None = None) -> CliffordCircuit:
    """Per target: fresh ``|0>`` auxiliary, partial swap by ``asin(sqrt(delta/2))``, discard."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    theta = partial_swap_theta(delta)
    gates = []
    for t in targets:
        gates += [Gate("RESET", (aux,)), Gate("PSWAP", (t, aux), theta), Gate("DISCARD", (aux,))]
    size = n_qubits if n_qubits is not None else max([aux, *targets]) + 1
    return CliffordCircuit(size, tuple(gates))
