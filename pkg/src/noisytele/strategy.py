"""Bob's correction strategies: regime choice, exhaustive and continuous search.

The fidelity objective is linear in each correction: with M_c the part of X
multiplying the correction for decoded outcome c,

    Tr X = sum_c Tr(O_c M_c),   M_c = 1/4 * sum_{(k, i) -> c} p_i T T_k,

and every M_c is diagonal for a canonical resource. The continuous problem over
SO(3) therefore reduces to the Pauli images, which are the vertices of the
tetrahedron of attainable rotation diagonals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalForm, DetSign
from .channels import as_model_I
from .protocol import (
    BELL_T_DIAG,
    PAULI_ROTATION_DIAG,
    RECEIVED,
    REGIME_STRATEGIES,
    CorrectionStrategy,
    all_strategies,
)
from .telefid import fidelity

# axes whose magnitudes are lost when the effective error pattern is i; under
# the regime strategy for pattern j the effective pattern is i XOR j
_LOSS_AXES = ((), (0, 2), (1, 2), (0, 1))


def regime_strategy(ch) -> CorrectionStrategy:
    """Table strategy for the dominant error pattern.

    Ties go to the first maximiser in pattern order 0, 1, 2, 3.
    """
    p = as_model_I(ch).p
    return REGIME_STRATEGIES[int(np.argmax(p))]


def _regime_value(t, p, j: int) -> float:
    loss = sum(p[i ^ j] * sum(t[a] for a in _LOSS_AXES[i]) for i in range(4))
    return 0.5 * (1 + sum(t) / 3) - loss / 3


def regime_fidelity(cf: CanonicalForm, ch) -> float:
    """Fidelity of the regime strategy, written out per dominant pattern.

    For p0 dominant this is the standard noisy-channel fidelity; the other
    three cases swap which patterns cost which pair of magnitudes. Positive
    determinant resources fall back to the exhaustive search.
    """
    p = as_model_I(ch).p
    if cf.det_sign is DetSign.POSITIVE:
        return fidelity_over_all_strategies(cf, ch).F
    return _regime_value(cf.t, p, int(np.argmax(p)))


def correction_weights(cf: CanonicalForm, ch) -> np.ndarray:
    """Diagonals of M_c, shape (4, 3): Tr X = sum_c diag(O_c) . M_c."""
    p = as_model_I(ch).p
    Tdiag = cf.lam * cf.t
    M = np.zeros((4, 3))
    for k in range(4):
        for i in range(4):
            M[RECEIVED[k, i]] += 0.25 * p[i] * Tdiag * BELL_T_DIAG[k]
    return M


@dataclass(frozen=True)
class StrategySearch:
    best: CorrectionStrategy
    F: float
    table: list[float]


def fidelity_over_all_strategies(cf: CanonicalForm, ch) -> StrategySearch:
    """Fidelity of every one of the 256 assignments, and the best one.

    The first maximiser in lexicographic assignment order wins ties.
    """
    M = correction_weights(cf, ch)
    gain = PAULI_ROTATION_DIAG @ M.T  # gain[d, c]: Pauli d used for outcome c
    strategies = all_strategies()
    idx = np.array([s.assignment for s in strategies])
    tr = gain[idx, np.arange(4)].sum(axis=1)
    values = 0.5 * (1 + tr / 3)
    b = int(np.argmax(values))
    return StrategySearch(strategies[b], float(values[b]), values.tolist())


def optimal_fidelity(cf: CanonicalForm, ch) -> tuple[CorrectionStrategy, float]:
    """Best regime strategy and its fidelity.

    The four regime strategies always contain a global optimum, but it need
    not be the one picked by the dominant pattern alone.
    """
    vals = [fidelity(cf, ch, s) for s in REGIME_STRATEGIES]
    j = int(np.argmax(vals))
    return REGIME_STRATEGIES[j], vals[j]


@dataclass(frozen=True)
class RotationTriple:
    """Euler angles (phi, psi, theta) of a proper rotation, z-y-z convention."""

    angles: tuple[float, float, float]

    @property
    def matrix(self) -> np.ndarray:
        return euler_rotation(*self.angles)


def euler_rotation(phi, psi, theta) -> np.ndarray:
    """Rz(phi) Ry(theta) Rz(psi); broadcasts over array arguments."""
    phi, psi, theta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (phi, psi, theta)))
    c1, s1 = np.cos(phi), np.sin(phi)
    c2, s2 = np.cos(psi), np.sin(psi)
    ct, st = np.cos(theta), np.sin(theta)
    R = np.empty(phi.shape + (3, 3))
    R[..., 0, 0] = c1 * ct * c2 - s1 * s2
    R[..., 0, 1] = -c1 * ct * s2 - s1 * c2
    R[..., 0, 2] = c1 * st
    R[..., 1, 0] = s1 * ct * c2 + c1 * s2
    R[..., 1, 1] = -s1 * ct * s2 + c1 * c2
    R[..., 1, 2] = s1 * st
    R[..., 2, 0] = -st * c2
    R[..., 2, 1] = st * s2
    R[..., 2, 2] = ct
    return R


def rotation_fidelity(cf: CanonicalForm, ch, rotations) -> np.ndarray:
    """Fidelity when Bob applies rotation ``rotations[..., c, :, :]`` for outcome c."""
    O = np.asarray(rotations, dtype=float)
    diag = np.diagonal(O, axis1=-2, axis2=-1)
    tr = np.einsum("...ca,ca->...", diag, correction_weights(cf, ch))
    return 0.5 * (1 + tr / 3)


def _euler_angles(n: int, rng: np.random.Generator):
    phi = rng.uniform(0, 2 * math.pi, (n, 4))
    psi = rng.uniform(0, 2 * math.pi, (n, 4))
    theta = np.arccos(rng.uniform(-1, 1, (n, 4)))
    return phi, psi, theta


def sample_rotations(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` quadruples of Euler rotations, shape (n, 4, 3, 3)."""
    return euler_rotation(*_euler_angles(n, rng))


def _sample_rotation_diagonals(n: int, rng: np.random.Generator) -> np.ndarray:
    # same draws as sample_rotations, keeping only the diagonal
    phi, psi, theta = _euler_angles(n, rng)
    ct = np.cos(theta)
    c1, s1, c2, s2 = np.cos(phi), np.sin(phi), np.cos(psi), np.sin(psi)
    return np.stack([c1 * ct * c2 - s1 * s2, c1 * c2 - s1 * ct * s2, ct], axis=-1)


def random_rotation_check(cf: CanonicalForm, ch, n_samples: int, rng: np.random.Generator,
                          chunk: int = 50_000) -> float:
    """Regime fidelity minus the best fidelity over sampled continuous corrections.

    A negative margin means some sampled set of rotations beats the regime
    strategy.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    M = correction_weights(cf, ch)
    best_tr = -np.inf
    left = n_samples
    while left > 0:
        m = min(chunk, left)
        tr = np.einsum("nca,ca->n", _sample_rotation_diagonals(m, rng), M)
        best_tr = max(best_tr, float(tr.max()))
        left -= m
    return regime_fidelity(cf, ch) - 0.5 * (1 + best_tr / 3)
