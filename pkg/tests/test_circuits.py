import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legoqec.circuits import CircuitError, CliffordCircuit, Gate, conjugate, heisenberg_back
from legoqec.pauli import PauliOperator
from oracles import dense, simulate_state

ONE = ["H", "S", "SDG", "X", "Y", "Z"]
TWO = ["CX", "CZ", "SWAP"]


def gates(n):
    one = st.builds(lambda k, q: Gate(k, (q,)), st.sampled_from(ONE), st.integers(0, n - 1))
    two = st.builds(
        lambda k, a, d: Gate(k, (a, (a + d) % n)), st.sampled_from(TWO), st.integers(0, n - 1), st.integers(1, n - 1)
    )
    return st.one_of(one, two)


def paulis(n):
    return st.builds(lambda x, z, ph: PauliOperator(n, x, z, ph), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1), st.sampled_from([0, 2]))


def unitary(circ):
    n = circ.n_qubits
    cols = []
    for i in range(2**n):
        prep = [Gate("X", (q,)) for q in range(n) if i >> (n - 1 - q) & 1]
        cols.append(simulate_state(CliffordCircuit(n, tuple(prep) + circ.gates)))
    return np.array(cols).T


@settings(max_examples=60, deadline=None)
@given(st.tuples(gates(3), paulis(3)))
def test_conjugation_matches_dense(case):
    g, p = case
    u = unitary(CliffordCircuit(3, (g,)))
    assert np.allclose(dense(conjugate(p, g)), u @ dense(p) @ u.conj().T)


@settings(max_examples=30, deadline=None)
@given(st.lists(gates(3), max_size=8), paulis(3))
def test_heisenberg_back_inverts_forward(gs, p):
    u = unitary(CliffordCircuit(3, tuple(gs)))
    assert np.allclose(dense(heisenberg_back(p, gs)), u.conj().T @ dense(p) @ u)


@settings(max_examples=30, deadline=None)
@given(st.lists(gates(3), max_size=8))
def test_inverse(gs):
    c = CliffordCircuit(3, tuple(gs))
    assert np.allclose(unitary(c + c.inverse()), np.eye(8))


def test_counts_and_text_round_trip(tmp_path):
    c = CliffordCircuit(3).append("H", 0).append("CX", 0, 1).append("PSWAP", 1, 2, param=0.25).append("MEASURE_Z", 2)
    assert c.counts == (3, 1, 2)
    assert c.n_measurements == 1
    assert CliffordCircuit.from_text(c.to_text()) == c
    c.save(tmp_path / "c.txt")
    assert CliffordCircuit.load(tmp_path / "c.txt").digest() == c.digest()


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("CX", (1, 1))
    with pytest.raises(CircuitError):
        Gate("FOO", (0,))
    with pytest.raises(CircuitError):
        Gate("H", (0,), 0.3)
    with pytest.raises(CircuitError):
        CliffordCircuit(1).append("CX", 0, 1)
