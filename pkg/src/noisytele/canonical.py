"""Reduction of a two-qubit state to its canonical (diagonal-correlation) form.

The correlation matrix is diagonalised by proper local rotations obtained
from its SVD. Singular directions are matched to the coordinate axes they
are most aligned with, so a state whose correlation matrix is already
diagonal keeps its axes. Magnitudes therefore stay attached to physical
axes, which matters once channel noise distinguishes x, y and z.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .qstate import PauliDecomposition, TwoQubitState, pauli_decompose, reconstruct

DET_ZERO_TOL = 1e-12
_OFFDIAG_TOL = 1e-14


class DetSign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1

    @classmethod
    def of(cls, det: float) -> DetSign:
        if abs(det) < DET_ZERO_TOL:
            return cls.ZERO
        return cls.POSITIVE if det > 0 else cls.NEGATIVE


def descending_order(t) -> np.ndarray:
    """Axis indices sorted by decreasing magnitude; ties keep axis order."""
    t = np.asarray(t, dtype=float)
    return np.argsort(-t, kind="stable")


def lambda_signs(det_sign: DetSign, t) -> np.ndarray:
    """Signs lambda_i for the canonical correlation diag(lambda_i * t_i).

    ``t`` holds per-axis magnitudes. For a non-positive determinant every sign
    is -1; for a positive one the axis carrying the smallest magnitude gets
    +1 (the last one in stable descending order when several tie).
    """
    t = np.asarray(t, dtype=float)
    lam = -np.ones(3)
    if DetSign(det_sign) is DetSign.POSITIVE:
        lam[descending_order(t)[-1]] = 1.0
    return lam


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical resource: correlation diag(lam * t), local vectors r, s.

    ``t`` and ``lam`` are indexed by physical axis (x, y, z); ``tmag`` is the
    same magnitudes sorted in decreasing order.
    """

    t: np.ndarray
    lam: np.ndarray
    det_sign: DetSign
    r: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(3)
        lam = np.asarray(self.lam, dtype=float).reshape(3)
        if np.any(t < -1e-12) or np.any(t > 1 + 1e-10):
            raise ValueError(f"magnitudes must lie in [0, 1], got {t}")
        if not np.all(np.isin(lam, (-1.0, 1.0))):
            raise ValueError(f"signs must be +-1, got {lam}")
        t = np.clip(t, 0, None)
        for name, v in (("t", t), ("lam", lam), ("r", self.r), ("s", self.s)):
            v = np.array(v, dtype=float).reshape(3)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "det_sign", DetSign(self.det_sign))

    @classmethod
    def from_magnitudes(cls, t, det_sign=DetSign.NEGATIVE, r=(0, 0, 0), s=(0, 0, 0)) -> CanonicalForm:
        return cls(t, lambda_signs(det_sign, t), det_sign, r, s)

    @property
    def tmag(self) -> np.ndarray:
        return self.t[descending_order(self.t)]

    @property
    def T(self) -> np.ndarray:
        """Signed diagonal correlation matrix."""
        return np.diag(self.lam * self.t)

    def state(self) -> TwoQubitState:
        return reconstruct(PauliDecomposition(self.r, self.s, self.T))


@dataclass(frozen=True)
class LocalRotations:
    """SO(3) images of Alice's and Bob's local unitaries."""

    O_A: np.ndarray
    O_B: np.ndarray


def _proper(m: np.ndarray) -> np.ndarray:
    if np.linalg.det(m) < 0:
        m = m.copy()
        m[2] *= -1
    return m


def _aligned_frame(U, V):
    """Rows of proper rotations built from singular vectors matched to axes."""
    best = None
    for perm in itertools.permutations(range(3)):
        score = sum(abs(U[a, j]) + abs(V[a, j]) for a, j in enumerate(perm))
        if best is None or score > best[0] + 1e-12:
            best = (score, perm)
    perm = best[1]
    OA = np.array([U[:, j] for j in perm])
    OB = np.array([V[:, j] for j in perm])
    for a in range(3):
        if OA[a, a] < 0:
            OA[a] *= -1
        if OB[a, a] < 0:
            OB[a] *= -1
    return _proper(OA), _proper(OB)


def canonicalize(state: TwoQubitState) -> tuple[CanonicalForm, LocalRotations]:
    """Canonical form of ``state`` and the local rotations that reach it.

    With R, S, T the Pauli coordinates of ``state``, the returned rotations
    satisfy O_A T O_B^T = diag(lam * t), r = O_A R, s = O_B S.
    """
    dec = pauli_decompose(state)
    T = np.array(dec.T)
    det_sign = DetSign.of(np.linalg.det(T))

    if np.max(np.abs(T - np.diag(np.diag(T)))) < _OFFDIAG_TOL:
        OA, OB = np.eye(3), np.eye(3)
    else:
        U, _, Vt = np.linalg.svd(T)
        OA, OB = _aligned_frame(U, Vt.T)

    D = OA @ T @ OB.T
    d = np.diag(D)
    t = np.abs(d)
    target = lambda_signs(det_sign, t)
    current = np.where(d < 0, -1.0, 1.0)
    flip = current != target
    if flip.sum() % 2:
        # only possible on the zero-determinant branch; the smallest magnitude
        # (zero up to DET_ZERO_TOL) keeps its sign
        k = int(np.argmin(t))
        target[k] = -target[k]
        flip[k] = not flip[k]
    OA = np.diag(np.where(flip, -1.0, 1.0)) @ OA

    cf = CanonicalForm(t, target, det_sign, OA @ dec.R, OB @ dec.S)
    return cf, LocalRotations(OA, OB)
