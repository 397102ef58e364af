"""Execution results: sampled shots or exact outcome distributions."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


class ResultFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExecutionResult:
    """Measurement bits per shot, columns in circuit order."""

    bits: np.ndarray
    circuit_hash: str = ""
    seed: int | None = None

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8)
        if b.ndim != 2:
            raise ResultFormatError("bits must be (shots, measurements)")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def shots(self) -> int:
        return self.bits.shape[0]

    @property
    def n_measurements(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExecutionResult)
            and self.circuit_hash == other.circuit_hash
            and self.seed == other.seed
            and np.array_equal(self.bits, other.bits)
        )

    def counts(self) -> dict[tuple[int, ...], int]:
        if self.shots == 0:
            return {}
        rows, counts = np.unique(self.bits, axis=0, return_counts=True)
        return {tuple(int(v) for v in r): int(c) for r, c in zip(rows, counts)}

    def to_text(self) -> str:
        head = f"# circuit {self.circuit_hash} seed {self.seed} shots {self.shots} measurements {self.n_measurements}\n"
        if self.n_measurements == 0:
            return head + "".join("\n" for _ in range(self.shots))
        chars = np.where(self.bits.astype(bool), "1", "0")
        return head + "".join("".join(row) + "\n" for row in chars)

    @classmethod
    def from_text(cls, text: str) -> "ExecutionResult":
        lines = text.split("\n")
        head = lines[0].split()
        if len(head) < 9 or head[0] != "#" or head[1] != "circuit":
            raise ResultFormatError("missing shot-file header")
        circuit_hash, seed, shots, m = head[2], head[4], int(head[6]), int(head[8])
        body = lines[1 : 1 + shots]
        if len(body) != shots or any(len(r) != m for r in body):
            raise ResultFormatError("shot file body does not match its header")
        bits = np.array([[c == "1" for c in r] for r in body], dtype=np.uint8).reshape(shots, m)
        return cls(bits, circuit_hash, None if seed == "None" else int(seed))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact joint distribution over measurement records."""

    n_measurements: int
    probs: dict[tuple[int, ...], float] = field(default_factory=dict)
    circuit_hash: str = ""

    def to_text(self) -> str:
        head = f"# exact circuit {self.circuit_hash} measurements {self.n_measurements}\n"
        return head + "".join(
            f"{''.join(map(str, k)) or '-'} {v!r}\n" for k, v in sorted(self.probs.items())
        )

    @classmethod
    def from_text(cls, text: str) -> "OutcomeDistribution":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) < 6 or head[1] != "exact":
            raise ResultFormatError("missing distribution header")
        m = int(head[5])
        probs = {}
        for ln in lines[1:]:
            key, val = ln.split()
            bits = () if key == "-" else tuple(int(c) for c in key)
            if len(bits) != m:
                raise ResultFormatError("outcome length mismatch")
            probs[bits] = float(val)
        return cls(m, probs, head[3])

    def sample(self, shots: int, rng: np.random.Generator) -> ExecutionResult:
        keys = sorted(self.probs)
        p = np.array([self.probs[k] for k in keys], dtype=float)
        p = p / p.sum()
        idx = rng.choice(len(keys), size=shots, p=p)
        table = np.array(keys, dtype=np.uint8).reshape(len(keys), self.n_measurements)
        return ExecutionResult(table[idx], self.circuit_hash)


def result_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
