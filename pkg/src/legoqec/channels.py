"""Single-qubit relaxation channels as superoperators.

Superoperators act on row-major ``vec(rho)``: ``vec(A rho B) = (A kron B^T) vec(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _sandwich(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of ``rho -> a rho b`` (``b`` defaults to ``a^dagger``)."""
    b = a.conj().T if b is None else b
    return np.kron(a, b.T)


def _check_delta(delta: float) -> None:
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")


@dataclass(frozen=True, eq=False)
class Channel:
    superop: np.ndarray

    @classmethod
    def from_kraus(cls, ops) -> "Channel":
        return cls(sum(_sandwich(k) for k in ops))

    @property
    def dim(self) -> int:
        return int(round(math.sqrt(self.superop.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.dim
        return (self.superop @ rho.reshape(d * d)).reshape(d, d)

    def choi(self) -> np.ndarray:
        """``sum_ij |i><j| (x) E(|i><j|)``, trace ``d``."""
        d = self.dim
        s = self.superop.reshape(d, d, d, d)  # [a, b, i, j]: E(|i><j|)[a, b]
        return s.transpose(2, 0, 3, 1).reshape(d * d, d * d)

    def kraus(self, tol: float = 1e-13) -> list[np.ndarray]:
        d = self.dim
        vals, vecs = np.linalg.eigh(self.choi())
        ops = []
        for lam, v in zip(vals, vecs.T):
            if lam > tol:
                # Choi index (i, a) -> K[a, i]
                ops.append(math.sqrt(lam) * v.reshape(d, d).T)
        return ops

    def is_cptp(self, tol: float = 1e-12) -> bool:
        d = self.dim
        j = self.choi()
        psd = np.linalg.eigvalsh((j + j.conj().T) / 2).min() >= -tol
        # trace preservation: partial trace over the output factor is the identity
        tp = np.allclose(np.einsum("iaja->ij", j.reshape(d, d, d, d)), np.eye(d), atol=tol)
        return bool(psd and tp)


def channel_from_eq4(delta: float) -> Channel:
    """Discrete relaxation map with parameter ``delta``.

    rho -> (1-D)^2 rho + D(2-D)[P+ rho P+ + X P- rho P- X] + (D/2)(1-D)[rho - Z rho Z]
    """
    _check_delta(delta)
    d = delta
    ident = np.kron(I2, I2)
    s = (1 - d) ** 2 * ident
    s = s + d * (2 - d) * (_sandwich(P0) + _sandwich(X @ P1))
    s = s + 0.5 * d * (1 - d) * (ident - _sandwich(Z))
    return Channel(s)


def partial_swap_unitary(theta: float) -> np.ndarray:
    """``exp(-i theta (XX + YY))`` on (target, auxiliary)."""
    return expm(-1j * theta * (np.kron(X, X) + np.kron(Y, Y)))


def gadget_channel(delta: float) -> Channel:
    """Channel seen by the target after the partial swap with a fresh ``|0>`` auxiliary."""
    _check_delta(delta)
    theta = math.asin(math.sqrt(delta / 2))
    u = partial_swap_unitary(theta)
    s = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            rho = np.zeros((2, 2), dtype=complex)
            rho[i, j] = 1
            full = u @ np.kron(rho, P0) @ u.conj().T
            out = np.einsum("iaja->ij", full.reshape(2, 2, 2, 2))
            s[:, 2 * i + j] = out.reshape(4)
    return Channel(s)


def amplitude_damping(gamma: float) -> Channel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return Channel.from_kraus([k0, k1])


def pauli_channel(px: float, py: float, pz: float) -> Channel:
    return Channel(
        (1 - px - py - pz) * np.kron(I2, I2)
        + px * _sandwich(X)
        + py * _sandwich(Y)
        + pz * _sandwich(Z)
    )


def reset_channel() -> Channel:
    return Channel(_sandwich(P0) + _sandwich(P0 @ X))


def gamma_from_delta(delta: float) -> float:
    return delta * (2 - delta)


def choi_trace_distance(a: Channel, b: Channel) -> float:
    """Trace distance between normalised Choi states."""
    diff = (a.choi() - b.choi()) / a.dim
    return 0.5 * float(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum())
