"""Stabilizer codes from quantum-lego networks, scored by a syndrome-table decoding protocol."""

from .codes import CheckMatrix, five_qubit_code, steane_code, trivial_code
from .evaluator import EvalReport, ShotRecord, build_correction_table, compute_pnd, evaluate, run_protocol
from .lego import LegoNetwork, derive_code
from .noise import NoiseModel
from .pauli import PauliOperator

__version__ = "0.1.0"

__all__ = [
    "CheckMatrix",
    "EvalReport",
    "LegoNetwork",
    "NoiseModel",
    "PauliOperator",
    "ShotRecord",
    "build_correction_table",
    "compute_pnd",
    "derive_code",
    "evaluate",
    "five_qubit_code",
    "run_protocol",
    "steane_code",
    "trivial_code",
]
