"""Teleportation with a noisy resource state and a noisy classical channel.

Average fidelity, fidelity deviation, optimal correction strategies and the
minimum classical cost of non-classical teleportation, together with an
independent simulator that checks every closed form.
"""

from .canonical import CanonicalForm, DetSign, canonicalize
from .channels import NoiseModelI, NoiseModelII, model_II_to_I, mutual_info_I, mutual_info_II
from .errors import InfeasibleError, NoisyTeleError, ParameterError, ScopeError, ValidationError
from .protocol import STANDARD, TABLE3, TABLE4, TABLE5, TABLE6, CorrectionStrategy
from .qstate import InputQubit, TwoQubitState, pauli_decompose, pure_state, werner_state
from .telefid import analyze, deviation, fidelity

__all__ = [
    "CanonicalForm",
    "CorrectionStrategy",
    "DetSign",
    "InfeasibleError",
    "InputQubit",
    "NoiseModelI",
    "NoiseModelII",
    "NoisyTeleError",
    "ParameterError",
    "STANDARD",
    "ScopeError",
    "TABLE3",
    "TABLE4",
    "TABLE5",
    "TABLE6",
    "TwoQubitState",
    "ValidationError",
    "analyze",
    "canonicalize",
    "deviation",
    "fidelity",
    "model_II_to_I",
    "mutual_info_I",
    "mutual_info_II",
    "pauli_decompose",
    "pure_state",
    "werner_state",
]
