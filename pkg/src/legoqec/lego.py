"""Quantum Lego blocks and stabilizer tensor-network contraction.

A block is a stabilizer state on its legs.  Gluing two open legs projects them
onto the Bell state ``|Phi+> = (|00> + |11>)/sqrt(2)``: only group elements that
act as ``II, XX, YY, ZZ`` on the pair survive, and ``YY|Phi+> = -|Phi+>`` flips
the sign of elements carrying a matched ``Y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .codes import CheckMatrix
from .pauli import PauliOperator, all_commute, gf2_rank, multiply, row_reduce, rref, tensor

Leg = tuple[int, int]  # (block index, leg index)


class LegoError(ValueError):
    pass


class DegenerateContractionError(LegoError):
    """The glued network has zero norm (``-I`` became derivable)."""


class InvalidAssignmentError(LegoError):
    pass


@dataclass(frozen=True)
class LegoBlock:
    name: str
    legs: int
    group: tuple[PauliOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "group", tuple(self.group))
        if any(g.n != self.legs for g in self.group):
            raise LegoError(f"block {self.name}: generators must act on {self.legs} legs")
        if not all_commute(self.group):
            raise LegoError(f"block {self.name}: generators do not commute")
        if gf2_rank(self.group) != len(self.group):
            raise LegoError(f"block {self.name}: generators are not independent")

    @classmethod
    def from_strings(cls, name: str, generators: Sequence[str]) -> "LegoBlock":
        group = [PauliOperator.from_str(g) for g in generators]
        return cls(name, group[0].n, tuple(group))


def bell_block() -> LegoBlock:
    return LegoBlock.from_strings("bell", ["+XX", "+ZZ"])


def t6_block() -> LegoBlock:
    """The [[4,2,2]] code as a 6-leg stabilizer state; legs 4 and 5 are its logicals."""
    return LegoBlock.from_strings(
        "t6",
        [
            "+XXXXII",
            "+ZZZZII",
            "+XXIIXI",
            "+ZIZIZI",
            "+XIXIIX",
            "+ZZIIIZ",
        ],
    )


def five_qubit_block() -> LegoBlock:
    """Encoding tensor of the [[5,1,3]] code (leg 5 logical); not in the default palette."""
    return LegoBlock.from_strings(
        "t6_513",
        ["+XZZXII", "+IXZZXI", "+XIXZZI", "+ZXIXZI", "+XXXXXX", "+ZZZZZZ"],
    )


DEFAULT_PALETTE: dict[str, LegoBlock] = {"t6": t6_block(), "bell": bell_block()}


def _contract_group(group: Sequence[PauliOperator], a: int, b: int) -> list[PauliOperator]:
    """Bell-project legs ``a`` and ``b`` of a stabilizer group and delete them."""
    n = group[0].n if group else 0
    # constraint columns: (x_a ^ x_b) and (z_a ^ z_b) must vanish
    def mismatch(bits: int) -> int:
        return ((bits >> a) ^ (bits >> b)) & 1

    rows = list(group)
    for part in ("x", "z"):
        hit = next((i for i, p in enumerate(rows) if mismatch(getattr(p, part))), None)
        if hit is None:
            continue
        piv = rows.pop(hit)
        rows = [multiply(p, piv) if mismatch(getattr(p, part)) else p for p in rows]

    keep = [q for q in range(n) if q not in (a, b)]
    out = []
    for p in rows:
        sign = -1 if (p.x >> a & 1) and (p.z >> a & 1) else 1
        r = p.restrict(keep)
        out.append(PauliOperator(r.n, r.x, r.z, p.phase + (2 if sign < 0 else 0)))
    basis, _, rest = row_reduce(out)
    if any(p.phase != 0 for p in rest):
        raise DegenerateContractionError(f"gluing legs {a} and {b} annihilates the state")
    return basis


@dataclass(frozen=True)
class LegoNetwork:
    """Immutable network; the group on the open legs is maintained incrementally."""

    blocks: tuple[LegoBlock, ...] = ()
    contractions: tuple[tuple[Leg, Leg], ...] = ()
    logical_legs: tuple[Leg, ...] = ()
    open_legs: tuple[Leg, ...] = ()
    group: tuple[PauliOperator, ...] = field(default=(), compare=False)

    @classmethod
    def from_blocks(cls, blocks: Sequence[LegoBlock]) -> "LegoNetwork":
        net = cls()
        for b in blocks:
            net = net.add_block(b)
        return net

    @property
    def n_open(self) -> int:
        return len(self.open_legs)

    def add_block(self, block: LegoBlock) -> "LegoNetwork":
        idx = len(self.blocks)
        n_old = self.n_open
        padded = [tensor(g, PauliOperator.identity(block.legs)) for g in self.group]
        padded += [tensor(PauliOperator.identity(n_old), g) for g in block.group]
        return LegoNetwork(
            self.blocks + (block,),
            self.contractions,
            self.logical_legs,
            self.open_legs + tuple((idx, leg) for leg in range(block.legs)),
            tuple(padded),
        )

    def leg_index(self, leg: Leg) -> int:
        try:
            return self.open_legs.index(tuple(leg))
        except ValueError:
            raise LegoError(f"leg {leg} is not open") from None

    def contract(self, leg_a: Leg, leg_b: Leg) -> "LegoNetwork":
        leg_a, leg_b = tuple(leg_a), tuple(leg_b)
        if leg_a == leg_b:
            raise LegoError("cannot glue a leg to itself")
        for leg in (leg_a, leg_b):
            if leg in self.logical_legs:
                raise LegoError(f"leg {leg} is assigned logical")
        ia, ib = self.leg_index(leg_a), self.leg_index(leg_b)
        group = _contract_group(self.group, ia, ib)
        return LegoNetwork(
            self.blocks,
            self.contractions + ((leg_a, leg_b),),
            self.logical_legs,
            tuple(l for l in self.open_legs if l not in (leg_a, leg_b)),
            tuple(group),
        )

    def assign_logical(self, leg: Leg) -> "LegoNetwork":
        leg = tuple(leg)
        self.leg_index(leg)
        if leg in self.logical_legs:
            raise LegoError(f"leg {leg} is already logical")
        return LegoNetwork(
            self.blocks, self.contractions, self.logical_legs + (leg,), self.open_legs, self.group
        )

    @property
    def physical_legs(self) -> tuple[Leg, ...]:
        return tuple(l for l in self.open_legs if l not in self.logical_legs)

    @property
    def is_scalar(self) -> bool:
        return self.n_open == 0

    def canonical_group(self) -> list[PauliOperator]:
        return rref(self.group)[0]

    # --- network description file -------------------------------------------------

    def to_text(self) -> str:
        lines = ["BLOCKS " + " ".join(b.name for b in self.blocks)]
        lines.append(
            "CONTRACT "
            + " ".join(f"({a[0]}.{a[1]})-({b[0]}.{b[1]})" for a, b in self.contractions)
        )
        lines.append("LOGICAL " + " ".join(f"({l[0]}.{l[1]})" for l in self.logical_legs))
        return "\n".join(line.rstrip() for line in lines) + "\n"

    @classmethod
    def from_text(cls, text: str, palette: dict[str, LegoBlock] | None = None) -> "LegoNetwork":
        palette = DEFAULT_PALETTE if palette is None else palette
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                key, _, rest = line.partition(" ")
                fields[key] = rest.strip()
        try:
            blocks = [palette[name] for name in fields.get("BLOCKS", "").split()]
        except KeyError as exc:
            raise LegoError(f"unknown palette block {exc.args[0]!r}") from None
        net = cls.from_blocks(blocks)
        leg_re = re.compile(r"\((\d+)\.(\d+)\)")
        for pair in fields.get("CONTRACT", "").split():
            legs = [(int(i), int(j)) for i, j in leg_re.findall(pair)]
            if len(legs) != 2:
                raise LegoError(f"bad contraction {pair!r}")
            net = net.contract(*legs)
        for i, j in leg_re.findall(fields.get("LOGICAL", "")):
            net = net.assign_logical((int(i), int(j)))
        return net

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path, palette=None) -> "LegoNetwork":
        return cls.from_text(Path(path).read_text(), palette)


def contract_pair(net: LegoNetwork, leg_a: Leg, leg_b: Leg) -> LegoNetwork:
    return net.contract(leg_a, leg_b)


def derive_code(net: LegoNetwork) -> CheckMatrix:
    """Read the network as an encoding map from its logical legs to its physical legs.

    For a state stabilized by ``P (x) Q`` (physical, logical), the encoder ``V``
    obeys ``P V = V Q^T``; ``X`` and ``Z`` are transpose-invariant, so elements
    whose logical restriction is exactly ``X_i`` (``Z_i``) give the logical X (Z)
    and elements trivial on the logical legs are stabilizers.
    """
    if net.is_scalar:
        raise InvalidAssignmentError("scalar network has no legs")
    n_open = net.n_open
    if len(net.group) != n_open:
        raise InvalidAssignmentError("network group is not a full stabilizer state")
    logical = [net.leg_index(l) for l in net.logical_legs]
    physical = [net.leg_index(l) for l in net.physical_legs]
    k = len(logical)
    if not physical:
        raise InvalidAssignmentError("no physical legs left")
    columns = [q for q in logical] + [n_open + q for q in logical]
    pivot_rows, pivots, rest = row_reduce(net.group, columns)
    if len(pivots) != 2 * k:
        raise InvalidAssignmentError("logical legs are not full rank in the network group")

    def phys(p: PauliOperator) -> PauliOperator:
        r = p.restrict(physical)
        return PauliOperator(r.n, r.x, r.z, p.phase)

    by_col = dict(zip(pivots, pivot_rows))
    lx = tuple(phys(by_col[q]) for q in logical)
    lz = tuple(phys(by_col[n_open + q]) for q in logical)
    stabs = tuple(phys(p) for p in rest)
    code = CheckMatrix(len(physical), k, stabs, lx, lz)
    return code.validate()
