"""Stabilizer tableau simulation and Pauli-frame shot sampling."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .circuits import CliffordCircuit, Gate
from .noise import NoiseModel
from .pauli import PauliOperator
from .results import ExecutionResult

BATCH = 8192


class UnsupportedGateError(ValueError):
    pass


def _g(x1, z1, x2, z2):
    x1 = x1.astype(np.int8)
    z1 = z1.astype(np.int8)
    x2 = x2.astype(np.int8)
    z2 = z2.astype(np.int8)
    return np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )


class Tableau:
    """Aaronson-Gottesman tableau on ``n`` qubits, initialised to ``|0...0>``.

    Rows ``0..n-1`` are destabilizers, ``n..2n-1`` stabilizers, ``2n`` is scratch.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n + 1, n), dtype=bool)
        self.z = np.zeros((2 * n + 1, n), dtype=bool)
        self.r = np.zeros(2 * n + 1, dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True
        self.z[n + idx, idx] = True

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n, t.x, t.z, t.r = self.n, self.x.copy(), self.z.copy(), self.r.copy()
        return t

    def _rowsum(self, h: int, i: int) -> None:
        total = 2 * int(self.r[h]) + 2 * int(self.r[i])
        total += int(_g(self.x[i], self.z[i], self.x[h], self.z[h]).sum())
        self.r[h] = (total % 4) == 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def h(self, a):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def cx(self, a, b):
        self.r ^= self.x[:, a] & self.z[:, b] & ~(self.x[:, b] ^ self.z[:, a])
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def apply(self, gate: Gate) -> int | None:
        k, q = gate.kind, gate.qubits
        if k == "H":
            self.h(q[0])
        elif k == "S":
            self.s(q[0])
        elif k == "SDG":
            self.s(q[0])
            self.r ^= self.x[:, q[0]]
        elif k == "X":
            self.r ^= self.z[:, q[0]]
        elif k == "Y":
            self.r ^= self.x[:, q[0]] ^ self.z[:, q[0]]
        elif k == "Z":
            self.r ^= self.x[:, q[0]]
        elif k == "CX":
            self.cx(*q)
        elif k == "CZ":
            self.h(q[1])
            self.cx(*q)
            self.h(q[1])
        elif k == "SWAP":
            a, b = q
            self.x[:, [a, b]] = self.x[:, [b, a]]
            self.z[:, [a, b]] = self.z[:, [b, a]]
        elif k == "MEASURE_Z":
            return self.measure(q[0])
        elif k == "RESET":
            if self.measure(q[0]):
                self.r ^= self.z[:, q[0]]
        elif k == "NOISE":
            pass
        else:
            raise UnsupportedGateError(f"{k} is not a Clifford operation")
        return None

    def measure(self, a: int, forced: int = 0) -> int:
        """Z measurement; random outcomes resolve to ``forced``."""
        n = self.n
        hits = np.flatnonzero(self.x[n : 2 * n, a])
        if hits.size:
            p = n + int(hits[0])
            for i in np.flatnonzero(self.x[: 2 * n, a]):
                if i != p:
                    self._rowsum(int(i), p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            self.r[p] = bool(forced)
            return int(forced)
        self.x[2 * n] = False
        self.z[2 * n] = False
        self.r[2 * n] = False
        for i in np.flatnonzero(self.x[:n, a]):
            self._rowsum(2 * n, int(i) + n)
        return int(self.r[2 * n])

    def run(self, circuit: CliffordCircuit) -> list[int]:
        out = []
        for g in circuit.gates:
            m = self.apply(g)
            if m is not None:
                out.append(m)
        return out

    def stabilizers(self) -> list[PauliOperator]:
        out = []
        for i in range(self.n, 2 * self.n):
            x = sum(1 << q for q in np.flatnonzero(self.x[i]))
            z = sum(1 << q for q in np.flatnonzero(self.z[i]))
            out.append(PauliOperator(self.n, x, z, 2 if self.r[i] else 0))
        return out

    def expectation(self, p: PauliOperator) -> int:
        """``<p>`` in ``{+1, -1, 0}`` for a Hermitian Pauli on the current state."""
        n = self.n
        px = np.array(p.x_bits, dtype=bool)
        pz = np.array(p.z_bits, dtype=bool)
        anti = ((self.x[: 2 * n] & pz) ^ (self.z[: 2 * n] & px)).sum(axis=1) % 2 == 1
        if anti[n:].any():
            return 0
        self.x[2 * n] = False
        self.z[2 * n] = False
        self.r[2 * n] = False
        for i in np.flatnonzero(anti[:n]):
            self._rowsum(2 * n, int(i) + n)
        assert np.array_equal(self.x[2 * n], px) and np.array_equal(self.z[2 * n], pz)
        return p.sign * (-1 if self.r[2 * n] else 1)


def _pauli_kick(fx, fz, q, probs, rng):
    px, py, pz = probs
    if px + py + pz <= 0:
        return
    u = rng.random(fx.shape[1])
    is_x = u < px
    is_y = (u >= px) & (u < px + py)
    is_z = (u >= px + py) & (u < px + py + pz)
    fx[q] ^= is_x | is_y
    fz[q] ^= is_z | is_y


def _depolarize(fx, fz, q, p, rng):
    if p > 0:
        _pauli_kick(fx, fz, q, (p / 3, p / 3, p / 3), rng)


def _sample_batch(circuit: CliffordCircuit, noise: NoiseModel, reference, shots, rng) -> np.ndarray:
    n = circuit.n_qubits
    fx = np.zeros((n, shots), dtype=bool)
    fz = rng.random((n, shots)) < 0.5
    for q in range(n):
        _depolarize(fx, fz, q, noise.prep, rng)
    out = np.zeros((shots, len(reference)), dtype=np.uint8)
    per_gate = noise.placement == "per_gate"
    m = 0
    for gate in circuit.gates:
        k, qs = gate.kind, gate.qubits
        if k == "MEASURE_Z":
            q = qs[0]
            out[:, m] = reference[m] ^ fx[q]
            fz[q] = rng.random(shots) < 0.5
            m += 1
            continue
        if k == "RESET":
            q = qs[0]
            fx[q] = False
            fz[q] = rng.random(shots) < 0.5
            _depolarize(fx, fz, q, noise.prep, rng)
            continue
        if k == "NOISE":
            if not per_gate:
                _pauli_kick(fx, fz, qs[0], noise.pauli_for(qs[0]), rng)
            continue
        if k == "H":
            q = qs[0]
            fx[q], fz[q] = fz[q].copy(), fx[q].copy()
        elif k in ("S", "SDG"):
            fz[qs[0]] ^= fx[qs[0]]
        elif k in ("X", "Y", "Z"):
            pass
        elif k == "CX":
            c, t = qs
            fx[t] ^= fx[c]
            fz[c] ^= fz[t]
        elif k == "CZ":
            a, b = qs
            fz[a] ^= fx[b]
            fz[b] ^= fx[a]
        elif k == "SWAP":
            a, b = qs
            fx[[a, b]] = fx[[b, a]]
            fz[[a, b]] = fz[[b, a]]
        else:
            raise UnsupportedGateError(f"{k} cannot run on the tableau engine")
        depol = noise.gate1 if len(qs) == 1 else noise.gate2
        for q in qs:
            _depolarize(fx, fz, q, depol, rng)
            if per_gate:
                _pauli_kick(fx, fz, q, noise.pauli_for(q), rng)
    return out


def batch_generators(seed: int, shots: int, batch: int = BATCH):
    """Counter-based generators, one per fixed-size batch, independent of threading."""
    n_batches = max(1, -(-shots // batch))
    children = np.random.SeedSequence(seed).spawn(n_batches)
    sizes = [min(batch, shots - i * batch) for i in range(n_batches)]
    return [(np.random.Generator(np.random.Philox(c)), s) for c, s in zip(children, sizes)]


def run_tableau(
    circuit: CliffordCircuit, noise: NoiseModel, shots: int, seed: int, threads: int = 1
) -> ExecutionResult:
    """Sample ``shots`` noisy runs of a Clifford circuit.

    A noiseless reference run fixes one valid outcome record; each shot is that
    record XOR the propagated Pauli frame.  Frames start (and restart after every
    measurement or reset) with uniformly random Z components, which reproduces
    the randomness of non-deterministic measurements.
    """
    if noise.has_relaxation:
        raise UnsupportedGateError("relaxation noise needs the dense engine")
    for g in circuit.gates:
        if g.kind in ("PSWAP", "DISCARD"):
            raise UnsupportedGateError(f"{g.kind} cannot run on the tableau engine")
    reference = np.array(Tableau(circuit.n_qubits).run(circuit), dtype=np.uint8)
    jobs = batch_generators(seed, shots)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _sample_batch(circuit, noise, reference, j[1], j[0]), jobs))
    else:
        parts = [_sample_batch(circuit, noise, reference, s, rng) for rng, s in jobs]
    bits = np.concatenate(parts, axis=0) if parts else np.zeros((0, len(reference)), np.uint8)
    return ExecutionResult(bits[:shots], circuit.digest(), seed)
