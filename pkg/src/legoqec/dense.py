"""Exact density-matrix engine.

Qubits are allocated lazily in ``|0>`` on first use, so ancillas that are only
touched by the noiseless tail of a circuit never enter the register.  That
tail (Clifford gates plus final measurements, with no noise able to fire) is
handled in the Heisenberg picture: each measured ``Z`` is pulled back to a
Pauli observable and the joint outcome distribution follows from the
expectations of all products of those commuting observables.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np

from .channels import (
    Channel,
    channel_from_eq4,
    partial_swap_unitary,
    pauli_channel,
    reset_channel,
)
from .circuits import CLIFFORD, ONE_QUBIT, CliffordCircuit, Gate, heisenberg_back
from .noise import NoiseModel
from .pauli import PauliOperator, multiply
from .results import ExecutionResult, OutcomeDistribution

DEFAULT_MAX_QUBITS = 12
_PRUNE = 1e-15

_UNITARIES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1]),
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1.0 + 0j, 1, 1, -1]),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


class CapacityError(RuntimeError):
    pass


class DensityRegister:
    """Branching density matrices keyed by the measurement record so far."""

    def __init__(self, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.max_qubits = max_qubits
        self.order: list[int] = []  # circuit qubit at each tensor axis
        self.branches: dict[tuple[int, ...], np.ndarray] = {(): np.ones((), dtype=complex)}

    @property
    def m(self) -> int:
        return len(self.order)

    def pos(self, q: int) -> int:
        return self.order.index(q)

    def allocate(self, q: int) -> bool:
        if q in self.order:
            return False
        if self.m + 1 > self.max_qubits:
            raise CapacityError(f"dense engine needs more than {self.max_qubits} qubits")
        m = self.m
        zero = np.zeros((2, 2), dtype=complex)
        zero[0, 0] = 1
        for key, t in self.branches.items():
            mat = t.reshape(2**m, 2**m)
            new = np.kron(mat, zero).reshape((2,) * (2 * m + 2))
            self.branches[key] = new
        self.order.append(q)
        return True

    def _left(self, t: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
        k = len(axes)
        opt = op.reshape((2,) * (2 * k))
        out = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), axes))
        return np.moveaxis(out, list(range(k)), axes)

    def unitary(self, u: np.ndarray, qubits) -> None:
        rows = [self.pos(q) for q in qubits]
        cols = [self.m + r for r in rows]
        uc = u.conj()
        for key, t in self.branches.items():
            self.branches[key] = self._left(self._left(t, u, rows), uc, cols)

    def channel(self, ch: Channel, q: int) -> None:
        r = self.pos(q)
        s4 = ch.superop.reshape(2, 2, 2, 2)
        for key, t in self.branches.items():
            out = np.tensordot(s4, t, axes=([2, 3], [r, self.m + r]))
            self.branches[key] = np.moveaxis(out, [0, 1], [r, self.m + r])

    def measure(self, q: int) -> None:
        r = self.pos(q)
        new = {}
        for key, t in self.branches.items():
            for bit in (0, 1):
                part = t.copy()
                sl = [slice(None)] * (2 * self.m)
                sl[r] = 1 - bit
                part[tuple(sl)] = 0
                sl = [slice(None)] * (2 * self.m)
                sl[self.m + r] = 1 - bit
                part[tuple(sl)] = 0
                if self.trace(part) > _PRUNE:
                    new[key + (bit,)] = part
        self.branches = new

    def trace(self, t: np.ndarray) -> float:
        d = 2**self.m
        return float(np.real(np.trace(t.reshape(d, d))))

    def expectation(self, t: np.ndarray, p: PauliOperator) -> float:
        """``Tr(rho p)`` with unallocated qubits in ``|0>``."""
        xmask = zmask = 0
        for q in range(p.n):
            xb, zb = p.x >> q & 1, p.z >> q & 1
            if not (xb or zb):
                continue
            if q not in self.order:
                if xb:
                    return 0.0
                continue
            bit = self.m - 1 - self.pos(q)
            xmask |= xb << bit
            zmask |= zb << bit
        d = 2**self.m
        mat = t.reshape(d, d)
        j = np.arange(d)
        signs = 1 - 2 * (np.bitwise_count(j & zmask) & 1).astype(np.int8)
        total = np.sum(signs * mat[j, j ^ xmask])
        phase = 1j ** ((p.phase + (p.x & p.z).bit_count()) % 4)
        return float(np.real(phase * total))


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    h = 1
    while h < len(v):
        v = v.reshape(-1, 2, h)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :], v[:, 1, :] = a + b, a - b
        v = v.reshape(-1)
        h *= 2
    return v


def _split_tail(circuit: CliffordCircuit, noise: NoiseModel) -> int:
    """Index where the noiseless Clifford-plus-final-measurement tail begins."""
    touched_later: set[int] = set()
    split = len(circuit.gates)
    per_gate = noise.placement == "per_gate"
    for i in range(len(circuit.gates) - 1, -1, -1):
        g = circuit.gates[i]
        if g.kind == "MEASURE_Z":
            if g.qubits[0] in touched_later:
                break
        elif g.kind in CLIFFORD:
            depol = noise.gate1 if g.kind in ONE_QUBIT else noise.gate2
            if depol or (per_gate and any(any(noise.pauli_for(q)) for q in g.qubits)):
                break
        elif g.kind == "NOISE":
            q = g.qubits[0]
            if noise.has_relaxation or (not per_gate and any(noise.pauli_for(q))):
                break
        else:
            break
        touched_later.update(g.qubits)
        split = i
    return split


def _tail_distribution(reg: DensityRegister, t: np.ndarray, tail: list[Gate], n: int) -> np.ndarray:
    unitaries = [g for g in tail if g.kind in CLIFFORD]
    observables = [
        heisenberg_back(PauliOperator.single(n, g.qubits[0], "Z"), unitaries)
        for g in tail
        if g.kind == "MEASURE_Z"
    ]
    mcount = len(observables)
    products = [PauliOperator.identity(n)]
    for s in range(1, 2**mcount):
        low = (s & -s).bit_length() - 1
        products.append(multiply(products[s & (s - 1)], observables[low]))
    ev = np.array([reg.expectation(t, p) for p in products])
    return _walsh_hadamard(ev) / 2**mcount


def exact_distribution(
    circuit: CliffordCircuit,
    noise: NoiseModel,
    relaxation: Literal["kraus", "gadget"] = "kraus",
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> OutcomeDistribution:
    reg = DensityRegister(max_qubits)
    split = _split_tail(circuit, noise)
    per_gate = noise.placement == "per_gate"
    scratch = circuit.n_qubits  # auxiliary for in-engine relaxation gadgets
    relax = channel_from_eq4(noise.relaxation_delta) if noise.has_relaxation else None
    pswap = None
    if noise.has_relaxation and relaxation == "gadget":
        pswap = partial_swap_unitary(math.asin(math.sqrt(noise.relaxation_delta / 2)))
    prep = pauli_channel(*(noise.prep / 3,) * 3) if noise.prep else None
    depol = {
        1: pauli_channel(*(noise.gate1 / 3,) * 3) if noise.gate1 else None,
        2: pauli_channel(*(noise.gate2 / 3,) * 3) if noise.gate2 else None,
    }

    def touch(q):
        if reg.allocate(q) and prep is not None:
            reg.channel(prep, q)

    def pauli_noise(q):
        probs = noise.pauli_for(q)
        if any(probs):
            reg.channel(pauli_channel(*probs), q)

    for g in circuit.gates[:split]:
        k, qs = g.kind, g.qubits
        for q in qs:
            touch(q)
        if k in _UNITARIES or k == "PSWAP":
            u = _UNITARIES[k] if k != "PSWAP" else partial_swap_unitary(g.param)
            reg.unitary(u, qs)
            ch = depol[len(qs)]
            for q in qs:
                if ch is not None:
                    reg.channel(ch, q)
                if per_gate:
                    pauli_noise(q)
        elif k == "MEASURE_Z":
            reg.measure(qs[0])
        elif k in ("RESET", "DISCARD"):
            reg.channel(reset_channel(), qs[0])
            if k == "RESET" and prep is not None:
                reg.channel(prep, qs[0])
        elif k == "NOISE":
            q = qs[0]
            if not per_gate:
                pauli_noise(q)
            if relax is not None:
                if pswap is None:
                    reg.channel(relax, q)
                else:
                    reg.allocate(scratch)
                    reg.channel(reset_channel(), scratch)
                    reg.unitary(pswap, (q, scratch))
                    reg.channel(reset_channel(), scratch)
        else:
            raise ValueError(f"unknown gate {k}")

    tail = list(circuit.gates[split:])
    n_tail = sum(g.kind == "MEASURE_Z" for g in tail)
    n_total = max(circuit.n_qubits, scratch + 1)
    probs: dict[tuple[int, ...], float] = {}
    for key, t in reg.branches.items():
        if n_tail == 0:
            probs[key] = probs.get(key, 0.0) + reg.trace(t)
            continue
        dist = _tail_distribution(reg, t, tail, n_total)
        for b, pr in enumerate(dist):
            if pr > _PRUNE:
                bits = tuple((b >> j) & 1 for j in range(n_tail))
                probs[key + bits] = probs.get(key + bits, 0.0) + float(pr)
    return OutcomeDistribution(circuit.n_measurements, probs, circuit.digest())


def run_dense(
    circuit: CliffordCircuit,
    noise: NoiseModel,
    shots: int | None = None,
    seed: int = 0,
    exact: bool = False,
    relaxation: Literal["kraus", "gadget"] = "kraus",
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> OutcomeDistribution | ExecutionResult:
    """Exact distribution (``exact=True``) or ``shots`` samples drawn from it."""
    dist = exact_distribution(circuit, noise, relaxation, max_qubits)
    if exact:
        return dist
    if shots is None:
        raise ValueError("sampling mode needs a shot count")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    res = dist.sample(shots, rng)
    return ExecutionResult(res.bits, res.circuit_hash, seed)


def final_state(
    circuit: CliffordCircuit, noise: NoiseModel | None = None, max_qubits: int = DEFAULT_MAX_QUBITS
) -> np.ndarray:
    """Density matrix on all ``circuit.n_qubits`` (qubit 0 most significant); no measurements."""
    if circuit.n_measurements:
        raise ValueError("final_state takes measurement-free circuits")
    reg = DensityRegister(max_qubits)
    for q in range(circuit.n_qubits):
        reg.allocate(q)
    _run_prefix(reg, circuit, noise or NoiseModel())
    (t,) = reg.branches.values()
    d = 2**reg.m
    return t.reshape(d, d)


def _run_prefix(reg: DensityRegister, circuit: CliffordCircuit, noise: NoiseModel) -> DensityRegister:
    for g in circuit.gates:
        k, qs = g.kind, g.qubits
        if k in _UNITARIES:
            reg.unitary(_UNITARIES[k], qs)
        elif k == "PSWAP":
            reg.unitary(partial_swap_unitary(g.param), qs)
        elif k in ("RESET", "DISCARD"):
            reg.channel(reset_channel(), qs[0])
        elif k == "NOISE":
            probs = noise.pauli_for(qs[0])
            if any(probs):
                reg.channel(pauli_channel(*probs), qs[0])
            if noise.has_relaxation:
                reg.channel(channel_from_eq4(noise.relaxation_delta), qs[0])
        else:
            raise ValueError(f"{k} not allowed in final_state")
    return reg
