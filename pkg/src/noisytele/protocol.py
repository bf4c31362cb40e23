"""Fixed algebra of the teleportation protocol.

Pauli matrices, the four Bell states and their correlation matrices, the
two-bit message encoding of each outcome, the error patterns of the noisy
classical channel, and Bob's correction strategies.

Conventions (locked here, used everywhere else):

* Bell outcome ``k`` is sent as the message ``MESSAGES[k]``:
  0 -> "00", 1 -> "11", 2 -> "01", 3 -> "10".
* Error pattern ``i`` is XOR-ed onto the sent message:
  0 -> none, 1 -> first bit flipped, 2 -> second bit flipped, 3 -> both.
* A strategy maps the outcome Bob *decodes* to the Pauli index he applies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
I2 = SIGMA[0]

_S = 1 / np.sqrt(2)
BELL_KETS = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, _S, 0],
        [0, _S, -_S, 0],
    ],
    dtype=complex,
)

# Correlation matrices of the Bell states, as diagonals.
BELL_T_DIAG = np.array(
    [
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ]
)
BELL_T = np.array([np.diag(d) for d in BELL_T_DIAG])

# SO(3) image of conjugation by each Pauli: sigma (n.sigma) sigma = (R n).sigma
PAULI_ROTATION_DIAG = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
)

MESSAGES = ("00", "11", "01", "10")
PATTERNS = ("00", "10", "01", "11")


def message_bits(message: str) -> int:
    if len(message) != 2 or any(c not in "01" for c in message):
        raise ValueError(f"two-bit message expected, got {message!r}")
    return int(message, 2)


def bits_message(bits: int) -> str:
    return format(bits, "02b")


_OUTCOME_OF_BITS = {message_bits(m): k for k, m in enumerate(MESSAGES)}

# RECEIVED[k, i]: outcome Bob decodes when outcome k was sent and pattern i hit.
RECEIVED = np.array(
    [
        [_OUTCOME_OF_BITS[message_bits(MESSAGES[k]) ^ message_bits(PATTERNS[i])] for i in range(4)]
        for k in range(4)
    ],
    dtype=int,
)


def pauli_for_rotation_diag(diag) -> int:
    """Return the Pauli index whose SO(3) image has the given diagonal."""
    diag = np.asarray(diag, dtype=float)
    for c in range(4):
        if np.allclose(PAULI_ROTATION_DIAG[c], diag):
            return c
    raise ValueError(f"{diag} is not the image of a Pauli operator")


@dataclass(frozen=True)
class CorrectionStrategy:
    """Pauli correction applied for each decoded Bell outcome.

    ``assignment[k]`` is the Pauli index (0..3 for sigma_0..sigma_3) that Bob
    applies when the received message decodes to outcome ``k``.
    """

    assignment: tuple[int, int, int, int]
    name: str = ""

    def __post_init__(self):
        a = tuple(int(c) for c in self.assignment)
        if len(a) != 4 or any(c not in range(4) for c in a):
            raise ValueError(f"strategy needs four Pauli indices in 0..3, got {self.assignment}")
        object.__setattr__(self, "assignment", a)

    @property
    def is_bijection(self) -> bool:
        return len(set(self.assignment)) == 4

    def rotations(self) -> np.ndarray:
        """SO(3) images of the four corrections, shape (4, 3, 3)."""
        return np.array([np.diag(PAULI_ROTATION_DIAG[c]) for c in self.assignment])

    def label(self) -> str:
        if self.name:
            return self.name
        return "(" + ",".join(f"s{c}" for c in self.assignment) + ")"

    def __str__(self):
        return self.label()


def _strategy_from_rotations(bell_indices, name):
    # O_k^dagger = -T_{bell_indices[k]}
    return CorrectionStrategy(
        tuple(pauli_for_rotation_diag(-BELL_T_DIAG[b]) for b in bell_indices), name
    )


TABLE3 = _strategy_from_rotations((0, 1, 2, 3), "table3")
TABLE4 = _strategy_from_rotations((3, 2, 1, 0), "table4")
TABLE5 = _strategy_from_rotations((2, 3, 0, 1), "table5")
TABLE6 = _strategy_from_rotations((1, 0, 3, 2), "table6")
STANDARD = TABLE3
REGIME_STRATEGIES = (TABLE3, TABLE4, TABLE5, TABLE6)
NAMED_STRATEGIES = {s.name: s for s in REGIME_STRATEGIES} | {"standard": STANDARD}


def all_strategies() -> list[CorrectionStrategy]:
    """All 256 assignments of Paulis to outcomes, in lexicographic order."""
    return [CorrectionStrategy(a) for a in itertools.product(range(4), repeat=4)]
