"""Stabilizer codes as signed check matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pauli import (
    DimensionError,
    PauliOperator,
    all_commute,
    gf2_rank,
    has_minus_identity,
    multiply,
    row_reduce,
    rref,
    symplectic_product,
)


class InvalidCodeError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class CheckMatrix:
    n: int
    k: int
    stabilizers: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]

    def __post_init__(self):
        for name in ("stabilizers", "logical_x", "logical_z"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @classmethod
    def from_strings(cls, stabilizers, logical_x=(), logical_z=(), validate=True):
        stabs = [PauliOperator.from_str(s) for s in stabilizers]
        lx = [PauliOperator.from_str(s) for s in logical_x]
        lz = [PauliOperator.from_str(s) for s in logical_z]
        n = (stabs or lx or lz)[0].n
        code = cls(n, len(lx), tuple(stabs), tuple(lx), tuple(lz))
        if validate:
            code.validate()
        return code

    @property
    def n_stabilizers(self) -> int:
        return len(self.stabilizers)

    def validate(self) -> "CheckMatrix":
        ops = self.stabilizers + self.logical_x + self.logical_z
        if any(p.n != self.n for p in ops):
            raise DimensionError("operators do not all act on n qubits")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise InvalidCodeError("need k logical X and k logical Z operators")
        if len(self.stabilizers) != self.n - self.k:
            raise InvalidCodeError(f"expected {self.n - self.k} stabilizers, got {len(self.stabilizers)}")
        if not all(p.is_hermitian for p in ops):
            raise InvalidCodeError("operators must be Hermitian")
        if not all_commute(self.stabilizers):
            raise InvalidCodeError("stabilizers do not commute")
        if gf2_rank(self.stabilizers) != len(self.stabilizers):
            raise InvalidCodeError("stabilizers are not independent")
        if has_minus_identity(self.stabilizers):
            raise InvalidCodeError("stabilizer group contains -I")
        for lg in self.logical_x + self.logical_z:
            if any(symplectic_product(lg, s) for s in self.stabilizers):
                raise InvalidCodeError(f"logical {lg} does not commute with the stabilizers")
        for i, a in enumerate(self.logical_x):
            for j, b in enumerate(self.logical_z):
                if symplectic_product(a, b) != (i == j):
                    raise InvalidCodeError(f"logical pair ({i}, {j}) has wrong commutation")
        if not all_commute(self.logical_x) or not all_commute(self.logical_z):
            raise InvalidCodeError("logicals of the same type must commute")
        return self

    def logical(self, basis: str, index: int = 0) -> PauliOperator:
        """Signed logical operator for ``basis`` in X/Y/Z; ``Y = i X Z``."""
        if basis == "X":
            return self.logical_x[index]
        if basis == "Z":
            return self.logical_z[index]
        if basis == "Y":
            return multiply(self.logical_x[index], self.logical_z[index]).times_i()
        raise ValueError(f"unknown logical basis {basis!r}")

    def check_matrix(self) -> np.ndarray:
        """``(n-k, 2n)`` uint8 array ``[X | Z]``."""
        out = np.zeros((len(self.stabilizers), 2 * self.n), dtype=np.uint8)
        for i, s in enumerate(self.stabilizers):
            out[i, : self.n] = s.x_bits
            out[i, self.n :] = s.z_bits
        return out

    def canonical_key(self) -> str:
        """Text of the rref'd stabilizer group plus the logicals; used for caching."""
        basis, _ = rref(self.stabilizers)
        parts = [f"{self.n} {self.k}"] + [str(s) for s in basis]
        parts += ["|"] + [str(p) for p in self.logical_x + self.logical_z]
        return ";".join(parts)

    def with_stabilizers(self, stabilizers) -> "CheckMatrix":
        return CheckMatrix(self.n, self.k, tuple(stabilizers), self.logical_x, self.logical_z)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.k}", "STAB"]
        lines += [str(s) for s in self.stabilizers]
        lines.append("LOGX")
        lines += [str(s) for s in self.logical_x]
        lines.append("LOGZ")
        lines += [str(s) for s in self.logical_z]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, validate: bool = True) -> "CheckMatrix":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        try:
            n, k = (int(t) for t in lines[0].split())
        except (IndexError, ValueError):
            raise InvalidCodeError("missing 'n k' header") from None
        sections = {"STAB": [], "LOGX": [], "LOGZ": []}
        current = None
        for ln in lines[1:]:
            if ln in sections:
                current = sections[ln]
            elif current is None:
                raise InvalidCodeError(f"operator line before any section: {ln!r}")
            else:
                current.append(PauliOperator.from_str(ln))
        code = cls(n, k, tuple(sections["STAB"]), tuple(sections["LOGX"]), tuple(sections["LOGZ"]))
        if validate:
            code.validate()
        return code

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CheckMatrix":
        return cls.from_text(Path(path).read_text())

    def __str__(self) -> str:
        return f"[[{self.n},{self.k}]] " + " ".join(str(s) for s in self.stabilizers)


def five_qubit_code() -> CheckMatrix:
    return CheckMatrix.from_strings(
        ["+XZZXI", "+IXZZX", "+XIXZZ", "+ZXIXZ"], ["+XXXXX"], ["+ZZZZZ"]
    )


def bit_flip_code() -> CheckMatrix:
    """The 2-qubit code with stabilizer ZZ."""
    return CheckMatrix.from_strings(["+ZZ"], ["+XX"], ["+ZI"])


def trivial_code() -> CheckMatrix:
    return CheckMatrix.from_strings([], ["+X"], ["+Z"])


def steane_code() -> CheckMatrix:
    return CheckMatrix.from_strings(
        ["+XIXIXIX", "+IXXIIXX", "+IIIXXXX", "+ZIZIZIZ", "+IZZIIZZ", "+IIIZZZZ"],
        ["+XXXXXXX"],
        ["+ZZZZZZZ"],
    )


def distance_by_enumeration(code: CheckMatrix, max_weight: int, budget: int = 5_000_000) -> int | None:
    """Minimum weight of a logical (normalizer minus stabilizer) Pauli.

    Returns ``None`` when no logical of weight ``<= max_weight`` exists.  Raises
    :class:`BudgetExceededError` up front when the candidate count would exceed
    ``budget``.
    """
    if max_weight < 1:
        raise ValueError("max_weight must be >= 1")
    n = code.n
    cost = sum(math.comb(n, w) * 3**w for w in range(1, min(max_weight, n) + 1))
    if cost > budget:
        raise BudgetExceededError(f"{cost} candidates exceed the budget of {budget}")

    stabs = [(s.x, s.z) for s in code.stabilizers]
    basis, pivots, _ = row_reduce(code.stabilizers)
    reduced = [(b.x | (b.z << n), col) for b, col in zip(basis, pivots)]

    def in_group(x: int, z: int) -> bool:
        v = x | (z << n)
        for b, col in reduced:
            if v >> col & 1:
                v ^= b
        return v == 0

    for w in range(1, min(max_weight, n) + 1):
        for support in itertools.combinations(range(n), w):
            for kinds in itertools.product(((1, 0), (1, 1), (0, 1)), repeat=w):
                x = z = 0
                for q, (xb, zb) in zip(support, kinds):
                    x |= xb << q
                    z |= zb << q
                if any(((x & sz) ^ (z & sx)).bit_count() & 1 for sx, sz in stabs):
                    continue
                if not in_group(x, z):
                    return w
    return None
