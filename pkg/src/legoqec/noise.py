"""Noise models shared by both engines.

``pauli``/``per_qubit`` probabilities fire at ``NOISE`` markers (placement
``after_encoding``) or after every gate on each operand (``per_gate``).
``relaxation_delta`` always fires at ``NOISE`` markers and needs the dense
engine.  ``gate1``/``gate2``/``prep`` are depolarizing device errors attached to
one-qubit gates, two-qubit gates and qubit initialisation regardless of placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PLACEMENTS = ("after_encoding", "per_gate")


class NoiseSpecError(ValueError):
    pass


def _check_probs(probs) -> tuple[float, float, float]:
    px, py, pz = (float(p) for p in probs)
    if min(px, py, pz) < 0 or px + py + pz > 1 + 1e-12:
        raise NoiseSpecError(f"invalid Pauli probabilities {probs}")
    return px, py, pz


@dataclass(frozen=True)
class NoiseModel:
    pauli: tuple[float, float, float] = (0.0, 0.0, 0.0)
    per_qubit: tuple[tuple[int, tuple[float, float, float]], ...] = ()
    relaxation_delta: float | None = None
    placement: str = "after_encoding"
    gate1: float = 0.0
    gate2: float = 0.0
    prep: float = 0.0
    _overrides: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pauli", _check_probs(self.pauli))
        items = tuple(sorted((int(q), _check_probs(p)) for q, p in dict(self.per_qubit).items()))
        object.__setattr__(self, "per_qubit", items)
        object.__setattr__(self, "_overrides", dict(items))
        if self.placement not in PLACEMENTS:
            raise NoiseSpecError(f"placement must be one of {PLACEMENTS}")
        if self.relaxation_delta is not None and not 0 <= self.relaxation_delta <= 1:
            raise NoiseSpecError("relaxation delta must lie in [0, 1]")
        for name in ("gate1", "gate2", "prep"):
            if not 0 <= getattr(self, name) <= 0.75:
                raise NoiseSpecError(f"{name} depolarizing probability must lie in [0, 0.75]")

    @classmethod
    def isotropic(cls, p: float, **kw) -> "NoiseModel":
        return cls(pauli=(p, p, p), **kw)

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls()

    def pauli_for(self, qubit: int) -> tuple[float, float, float]:
        return self._overrides.get(qubit, self.pauli)

    @property
    def has_relaxation(self) -> bool:
        return bool(self.relaxation_delta)

    @property
    def has_pauli(self) -> bool:
        return any(self.pauli) or any(any(p) for _, p in self.per_qubit)

    @property
    def has_gate_noise(self) -> bool:
        """Noise that can strike after the benchmark slot."""
        return bool(self.gate1 or self.gate2 or self.prep) or (
            self.placement == "per_gate" and self.has_pauli
        )

    @property
    def is_noiseless(self) -> bool:
        return not (self.has_pauli or self.has_relaxation or self.gate1 or self.gate2 or self.prep)

    @property
    def gamma_t(self) -> float | None:
        """``Gamma t = 2 log(1 / (1 - delta))`` for the relaxation setting."""
        if self.relaxation_delta is None:
            return None
        if self.relaxation_delta >= 1:
            return math.inf
        return 2.0 * math.log(1.0 / (1.0 - self.relaxation_delta))

    def without_relaxation(self) -> "NoiseModel":
        return NoiseModel(self.pauli, self.per_qubit, None, self.placement, self.gate1, self.gate2, self.prep)

    def to_spec(self) -> str:
        parts = []
        if any(self.pauli):
            px, py, pz = self.pauli
            parts.append(f"iso:{px!r}" if px == py == pz else f"pauli:{px!r}/{py!r}/{pz!r}")
        for q, (px, py, pz) in self.per_qubit:
            parts.append(f"q{q}:{px!r}/{py!r}/{pz!r}")
        if self.relaxation_delta is not None:
            parts.append(f"relax:{self.relaxation_delta!r}")
        for name in ("gate1", "gate2", "prep"):
            if getattr(self, name):
                parts.append(f"{name}:{getattr(self, name)!r}")
        if self.placement != "after_encoding":
            parts.append(f"placement:{self.placement}")
        return ";".join(parts) or "none"

    @classmethod
    def from_spec(cls, spec: str) -> "NoiseModel":
        """Parse e.g. ``iso:0.01``, ``pauli:0.01/0.01/0.05;relax:0.1``, ``q1:0.05/0/0``."""
        kw: dict = {}
        per_qubit = {}
        spec = spec.strip()
        if spec in ("", "none"):
            return cls()
        for token in spec.split(";"):
            key, sep, value = token.strip().partition(":")
            if not sep:
                raise NoiseSpecError(f"bad noise token {token!r}")
            try:
                if key == "iso":
                    p = float(value)
                    kw["pauli"] = (p, p, p)
                elif key == "pauli":
                    kw["pauli"] = tuple(float(v) for v in value.split("/"))
                elif key.startswith("q") and key[1:].isdigit():
                    per_qubit[int(key[1:])] = tuple(float(v) for v in value.split("/"))
                elif key == "relax":
                    kw["relaxation_delta"] = float(value)
                elif key in ("gate1", "gate2", "prep"):
                    kw[key] = float(value)
                elif key == "placement":
                    kw["placement"] = value
                else:
                    raise NoiseSpecError(f"unknown noise key {key!r}")
            except ValueError as exc:
                if isinstance(exc, NoiseSpecError):
                    raise
                raise NoiseSpecError(f"bad value in {token!r}") from None
        return cls(per_qubit=tuple(per_qubit.items()), **kw)
