"""Independent reference computations: dense matrices and brute-force enumeration.

Nothing here goes through the GF(2) machinery under test except parsing.
Dense convention: qubit 0 is the most significant tensor factor.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from legoqec.circuits import CliffordCircuit, Gate
from legoqec.evaluator import ShotRecord
from legoqec.pauli import PauliOperator
from legoqec.tableau import Tableau

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliOperator) -> np.ndarray:
    mat = reduce(np.kron, [PAULI[p.letter(q)] for q in range(p.n)], np.eye(1, dtype=complex))
    return (1j**p.phase) * mat


def projector(generators, n: int) -> np.ndarray:
    proj = np.eye(2**n, dtype=complex)
    for g in generators:
        proj = proj @ (np.eye(2**n) + dense(g)) / 2
    return proj


def state_from_group(generators, n: int) -> np.ndarray:
    """The unit vector spanning the +1 space of a full stabilizer group."""
    vals, vecs = np.linalg.eigh(projector(generators, n))
    assert abs(vals[-1] - 1) < 1e-9 and (n == 0 or vals[-2] < 1e-9)
    return vecs[:, -1]


def bell_contract(psi: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """Apply the (unnormalised) Bell bra ``<00| + <11|`` on legs ``a``, ``b``."""
    return np.trace(psi.reshape([2] * n), axis1=a, axis2=b).reshape(-1)


def network_state(net) -> np.ndarray:
    """Dense state of a lego network, replaying its blocks and contractions."""
    psi = np.ones(1, dtype=complex)
    legs = []
    for i, blk in enumerate(net.blocks):
        psi = np.kron(psi, state_from_group(blk.group, blk.legs))
        legs += [(i, j) for j in range(blk.legs)]
    for la, lb in net.contractions:
        a, b = legs.index(la), legs.index(lb)
        psi = bell_contract(psi, len(legs), a, b)
        legs = [l for l in legs if l not in (la, lb)]
    assert tuple(legs) == net.open_legs
    return psi


def random_stabilizer_group(m: int, rng: np.random.Generator, depth: int = 12) -> list[PauliOperator]:
    """Stabilizers of a random Clifford circuit applied to ``|0...0>``."""
    t = Tableau(m)
    for _ in range(depth):
        if m > 1 and rng.random() < 0.4:
            a, b = rng.choice(m, 2, replace=False)
            t.apply(Gate(("CX", "CZ")[rng.integers(2)], (int(a), int(b))))
        else:
            t.apply(Gate(("H", "S", "X", "Z")[rng.integers(4)], (int(rng.integers(m)),)))
    return t.stabilizers()


def simulate_state(circuit: CliffordCircuit) -> np.ndarray:
    """Statevector of a unitary Clifford circuit from ``|0...0>``."""
    n = circuit.n_qubits
    one = {
        "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
        "S": np.diag([1, 1j]),
        "SDG": np.diag([1, -1j]),
        **{k: PAULI[k] for k in "XYZ"},
    }
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for g in circuit.gates:
        t = psi.reshape([2] * n)
        if g.kind in one:
            t = np.moveaxis(np.tensordot(one[g.kind], t, axes=([1], [g.qubits[0]])), 0, g.qubits[0])
        elif g.kind in ("CX", "CZ", "SWAP"):
            a, b = g.qubits
            t = t.copy()
            idx1 = [slice(None)] * n
            idx1[a] = 1
            sub = t[tuple(idx1)]
            bb = b - (b > a)
            if g.kind == "CX":
                sub = np.flip(sub, axis=bb)
            elif g.kind == "CZ":
                sl = [slice(None)] * (n - 1)
                sl[bb] = 1
                sub = sub.copy()
                sub[tuple(sl)] *= -1
            if g.kind == "SWAP":
                t = np.swapaxes(t, a, b)
            else:
                t[tuple(idx1)] = sub
        else:
            raise ValueError(g.kind)
        psi = t.reshape(-1)
    return psi


def enumerate_records(code, probs_per_qubit, bases=(("X", 1), ("X", -1), ("Y", 1), ("Y", -1), ("Z", 1), ("Z", -1))):
    """Exact records for a single Pauli layer on the data, by summing over all 4^n errors."""
    n = code.n
    px, py, pz = probs_per_qubit
    weight = {"I": 1 - px - py - pz, "X": px, "Y": py, "Z": pz}
    mats_s = [dense(s) for s in code.stabilizers]
    logicals = {b: dense(code.logical(b)) for b in "XYZ"}
    out: dict[tuple, float] = {}
    for letters in itertools.product("IXYZ", repeat=n):
        pr = float(np.prod([weight[c] for c in letters]))
        if pr == 0:
            continue
        e = reduce(np.kron, [PAULI[c] for c in letters])

        def anti(m):
            return not np.allclose(e @ m, m @ e)

        syn = "".join("1" if anti(m) else "0" for m in mats_s)
        for b, s in bases:
            key = (b, s, syn, -s if anti(logicals[b]) else s)
            out[key] = out.get(key, 0.0) + pr / len(bases)
    return [ShotRecord(*k, w) for k, w in sorted(out.items())]


def enumerate_pnd(code, p: float) -> float:
    """Min-over-tables uncorrected rate for isotropic ``p``: brute force over each syndrome's 4 choices."""
    records = enumerate_records(code, (p, p, p))
    bad = 0.0
    for syn in {r.syndrome for r in records}:
        group = [r for r in records if r.syndrome == syn]
        best = 0.0
        for corr in "IXYZ":
            fixed = 0.0
            for r in group:
                flip = corr != "I" and corr != r.basis
                if r.sign_out * (-1 if flip else 1) == r.sign_in:
                    fixed += r.weight
            best = max(best, fixed)
        bad += sum(r.weight for r in group) - best
    return bad / sum(r.weight for r in records)


def random_network(rng: np.random.Generator, max_legs: int = 6):
    """Random blocks (total legs <= max_legs) and random contractions; returns (net, degenerate)."""
    from legoqec.lego import DegenerateContractionError, LegoBlock, LegoNetwork, bell_block, t6_block

    blocks = []
    total = 0
    while total < max_legs:
        room = max_legs - total
        r = rng.random()
        if r < 0.15 and room >= 6:
            blk = t6_block()
        elif r < 0.35 and room >= 2:
            blk = bell_block()
        else:
            m = int(rng.integers(1, min(4, room) + 1))
            blk = LegoBlock(f"r{len(blocks)}", m, tuple(random_stabilizer_group(m, rng)))
        blocks.append(blk)
        total += blk.legs
        if rng.random() < 0.3:
            break
    net = LegoNetwork.from_blocks(blocks)
    for _ in range(int(rng.integers(0, total // 2 + 1))):
        if net.n_open < 2:
            break
        i, j = rng.choice(net.n_open, 2, replace=False)
        try:
            net = net.contract(net.open_legs[i], net.open_legs[j])
        except DegenerateContractionError:
            return net, (net.open_legs[i], net.open_legs[j])
    return net, None


def check_network_against_dense(net, failed_pair=None, tol: float = 1e-10) -> None:
    """Assert the GF(2) network agrees with the dense Bell-projection oracle."""
    from legoqec.lego import LegoNetwork

    if failed_pair is not None:
        # the oracle must see a zero-norm state after the refused gluing
        probe = LegoNetwork(net.blocks, net.contractions + (failed_pair,), (), (), ())
        psi = network_state_with_open(probe, net.open_legs, failed_pair)
        assert np.linalg.norm(psi) < tol
        return
    psi = network_state(net)
    norm = np.linalg.norm(psi)
    assert norm > tol
    n = net.n_open
    if n == 0:
        return
    psi = psi / norm
    assert np.allclose(np.outer(psi, psi.conj()), projector(net.group, n), atol=tol)


def network_state_with_open(net, open_before, pair) -> np.ndarray:
    psi = np.ones(1, dtype=complex)
    legs = []
    for i, blk in enumerate(net.blocks):
        psi = np.kron(psi, state_from_group(blk.group, blk.legs))
        legs += [(i, j) for j in range(blk.legs)]
    for la, lb in net.contractions:
        a, b = legs.index(la), legs.index(lb)
        psi = bell_contract(psi, len(legs), a, b)
        legs = [l for l in legs if l not in (la, lb)]
    return psi


def check_code_against_dense(net, code, tol: float = 1e-10) -> None:
    """Codespace projector and logical action of ``derive_code`` against the encoding map."""
    psi = network_state(net)
    legs = list(net.open_legs)
    phys = [legs.index(l) for l in net.physical_legs]
    logi = [legs.index(l) for l in net.logical_legs]
    t = psi.reshape([2] * len(legs)).transpose(phys + logi)
    v = t.reshape(2 ** len(phys), 2 ** len(logi))
    v = v / np.linalg.norm(v[:, 0])
    gram = v.conj().T @ v
    assert np.allclose(gram, np.eye(len(gram)), atol=tol)
    assert np.allclose(v @ v.conj().T, projector(code.stabilizers, code.n), atol=tol)
    assert np.allclose(dense(code.logical("X")) @ v, v @ PAULI["X"], atol=tol)
    assert np.allclose(dense(code.logical("Z")) @ v, v @ PAULI["Z"], atol=tol)
