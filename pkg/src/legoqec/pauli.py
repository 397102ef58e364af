"""Signed Pauli operators and symplectic linear algebra over GF(2).

Bit vectors are packed Python ints with qubit ``q`` stored at bit ``q``.
A Pauli is stored as ``i**phase * P_0 (x) P_1 (x) ...`` where each ``P_q`` is the
Hermitian single-qubit Pauli selected by ``(x_q, z_q)``; ``(1, 1)`` is ``Y = iXZ``.
Hermitian group elements therefore have ``phase`` in ``{0, 2}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {c: b for b, c in _CHARS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.n < 0 or self.x & ~mask or self.z & ~mask:
            raise DimensionError(f"bit vectors exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_str(cls, text: str) -> "PauliOperator":
        """Parse ``'+XZZXI'``, ``'-YY'``, ``'XX'`` (implicit +) or ``'+iY'``."""
        s = text.strip().replace("−", "-")
        phase = 0
        if s[:1] in "+-":
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
        if s[:1] == "i":
            phase += 1
            s = s[1:]
        x = z = 0
        for q, c in enumerate(s):
            try:
                xb, zb = _BITS[c]
            except KeyError:
                raise ValueError(f"bad Pauli character {c!r} in {text!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(s), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 1) -> "PauliOperator":
        xb, zb = _BITS[kind]
        return cls(n, xb << qubit, zb << qubit, 0 if sign > 0 else 2)

    @property
    def sign(self) -> int:
        if self.phase & 1:
            raise ValueError(f"{self} is not Hermitian; no real sign")
        return 1 if self.phase == 0 else -1

    @property
    def is_hermitian(self) -> bool:
        return not self.phase & 1

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n) if s >> q & 1]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def x_bits(self) -> list[int]:
        return [self.x >> q & 1 for q in range(self.n)]

    @property
    def z_bits(self) -> list[int]:
        return [self.z >> q & 1 for q in range(self.n)]

    def letter(self, qubit: int) -> str:
        return _CHARS[(self.x >> qubit & 1, self.z >> qubit & 1)]

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def with_sign(self, sign: int) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0 if sign > 0 else 2)

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def times_i(self, power: int = 1) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + power)

    def symplectic_vector(self) -> int:
        """``x | z << n`` packed in one int (x-block first)."""
        return self.x | (self.z << self.n)

    def restrict(self, qubits: Sequence[int]) -> "PauliOperator":
        """Unsigned restriction to ``qubits`` (in the given order)."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= (self.x >> q & 1) << i
            z |= (self.z >> q & 1) << i
        return PauliOperator(len(qubits), x, z)

    def embed(self, n: int, qubits: Sequence[int]) -> "PauliOperator":
        """Place this operator on ``qubits`` of an ``n``-qubit register."""
        if len(qubits) != self.n:
            raise DimensionError("embedding map has the wrong length")
        x = z = 0
        for i, q in enumerate(qubits):
            x |= (self.x >> i & 1) << q
            z |= (self.z >> i & 1) << q
        return PauliOperator(n, x, z, self.phase)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"


def _check(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"Pauli operators on {a.n} and {b.n} qubits")


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    _check(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    # i-power picked up by sigma(x1,z1) * sigma(x2,z2), summed over qubits
    X1, Y1, Z1 = x1 & ~z1, x1 & z1, z1 & ~x1
    X2, Y2, Z2 = x2 & ~z2, x2 & z2, z2 & ~x2
    plus = ((X1 & Y2) | (Y1 & Z2) | (Z1 & X2)).bit_count()
    minus = ((Y1 & X2) | (X1 & Z2) | (Z1 & Y2)).bit_count()
    return plus - minus


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact group product ``a @ b``; anticommuting inputs give an imaginary phase."""
    _check(a, b)
    phase = a.phase + b.phase + _product_phase(a.x, a.z, b.x, b.z)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def _column_bit(p: PauliOperator, col: int) -> int:
    return (p.x >> col & 1) if col < p.n else (p.z >> (col - p.n) & 1)


def row_reduce(
    rows: Iterable[PauliOperator], columns: Sequence[int] | None = None
) -> tuple[list[PauliOperator], list[int], list[PauliOperator]]:
    """Gauss-Jordan elimination with exact phases.

    Columns ``0..n-1`` are x bits, ``n..2n-1`` z bits; ``columns`` fixes the
    pivot search order (default: x-block then z-block).  Ties go to the lowest
    row index.  Returns ``(pivot_rows, pivot_columns, rest)`` where ``rest`` are
    the rows left over after elimination (identity rows when ``columns`` covers
    every column, in which case their phases expose ``-I`` relations).
    """
    rows = list(rows)
    if not rows:
        return [], [], []
    n = rows[0].n
    for r in rows:
        _check(rows[0], r)
    if columns is None:
        columns = range(2 * n)
    pivots: list[int] = []
    r = 0
    for col in columns:
        if r >= len(rows):
            break
        hit = next((i for i in range(r, len(rows)) if _column_bit(rows[i], col)), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        piv = rows[r]
        for i in range(len(rows)):
            if i != r and _column_bit(rows[i], col):
                rows[i] = multiply(rows[i], piv)
        pivots.append(col)
        r += 1
    return rows[:r], pivots, rows[r:]


def rref(rows: Iterable[PauliOperator]) -> tuple[list[PauliOperator], int]:
    """Canonical independent generating set of the group generated by ``rows``.

    Rows that reduce to the identity are dropped; use :func:`has_minus_identity`
    to detect inconsistent (``-I``) relations.
    """
    basis, _, _ = row_reduce(rows)
    return basis, len(basis)


def has_minus_identity(rows: Iterable[PauliOperator]) -> bool:
    _, _, rest = row_reduce(rows)
    return any(p.phase != 0 for p in rest)


def gf2_rank(rows: Iterable[PauliOperator]) -> int:
    return rref(rows)[1]


def in_span(p: PauliOperator, rows: Sequence[PauliOperator]) -> bool:
    """Whether the bit pattern of ``p`` lies in the GF(2) span of ``rows`` (signs ignored)."""
    basis, pivots, _ = row_reduce(rows)
    v = p.unsigned()
    for b, col in zip(basis, pivots):
        if _column_bit(v, col):
            v = multiply(v, b)
    return v.is_identity


def all_commute(rows: Sequence[PauliOperator]) -> bool:
    return all(
        symplectic_product(rows[i], rows[j]) == 0
        for i in range(len(rows))
        for j in range(i + 1, len(rows))
    )


def tensor(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """``a (x) b`` with ``b`` on the high qubits."""
    return PauliOperator(a.n + b.n, a.x | (b.x << a.n), a.z | (b.z << a.n), a.phase + b.phase)
