"""Closed-form teleportation fidelity and fidelity deviation.

For a canonical resource with correlation diag(lam * t), a channel and a
correction strategy, Bob's average output is (I + (X a + b).sigma)/2 with a
diagonal matrix X and a constant offset b (zero for bijective strategies).
Everything here is derived from that affine map:

    F     = (1 + Tr X / 3) / 2
    Delta = sqrt((Tr X^2 - (Tr X)^2 / 3) / 30 + |b|^2 / 12)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .canonical import CanonicalForm, DetSign
from .channels import NoiseModelI, NoiseModelII, as_model_I
from .errors import InfeasibleError, ParameterError, ScopeError
from .protocol import BELL_T_DIAG, PAULI_ROTATION_DIAG, RECEIVED, STANDARD, CorrectionStrategy

CLASSICAL_LIMIT = 2 / 3
DISPERSION_TOL = 1e-10


@dataclass(frozen=True)
class ChiMatrix:
    diag: np.ndarray
    offset: np.ndarray

    @property
    def trace(self) -> float:
        return float(self.diag.sum())


@dataclass(frozen=True)
class FidelityReport:
    F: float
    Delta: float
    nonclassical: bool
    dispersion_free: bool
    f_noise: float
    strategy: CorrectionStrategy


def chi_matrix(cf: CanonicalForm, ch, strat: CorrectionStrategy = STANDARD) -> ChiMatrix:
    """Diagonal of X (and offset b) for the given channel and strategy."""
    p = as_model_I(ch).p
    Tdiag = cf.lam * cf.t
    # rot[k, i]: rotation applied when outcome k was sent and pattern i hit
    rot = PAULI_ROTATION_DIAG[np.asarray(strat.assignment)[RECEIVED]]
    weight = p[None, :, None] * rot
    diag = 0.25 * np.einsum("kia,ka->a", weight, BELL_T_DIAG) * Tdiag
    offset = 0.25 * weight.sum(axis=(0, 1)) * cf.s
    return ChiMatrix(diag, offset)


def _fidelity_from_chi(chi: ChiMatrix) -> float:
    return 0.5 * (1 + chi.trace / 3)


def _deviation_from_chi(chi: ChiMatrix) -> float:
    # Tr X^2 - (Tr X)^2 / 3 in centred form, exact zero for equal entries
    d = chi.diag - chi.diag.mean()
    var = np.dot(d, d) / 30 + np.dot(chi.offset, chi.offset) / 12
    return math.sqrt(max(var, 0.0))


def fidelity(cf: CanonicalForm, ch, strat: CorrectionStrategy = STANDARD) -> float:
    return _fidelity_from_chi(chi_matrix(cf, ch, strat))


def deviation(cf: CanonicalForm, ch, strat: CorrectionStrategy = STANDARD) -> float:
    return _deviation_from_chi(chi_matrix(cf, ch, strat))


def noise_term(cf: CanonicalForm, ch) -> float:
    """f_noise for Model I, f'_noise for Model II (same value after conversion)."""
    t1, t2, t3 = cf.t
    if isinstance(ch, NoiseModelII):
        e, f = ch.eta, ch.eta_prime
        return t1 * (1 - e) + t2 * (1 - f) + t3 * (e + f - 2 * e * f)
    _, p1, p2, p3 = as_model_I(ch).p
    return p1 * (t1 + t3) + p2 * (t2 + t3) + p3 * (t1 + t2)


def branch_fidelity(cf: CanonicalForm, ch) -> float:
    """Standard-strategy fidelity written per determinant branch.

    Non-positive determinant: noiseless fidelity minus f_noise / 3. Positive
    determinant: the signed trace sum with the +1 sign on the smallest axis.
    """
    t = cf.t
    if cf.det_sign is not DetSign.POSITIVE:
        return 0.5 * (1 + t.sum() / 3) - noise_term(cf, ch) / 3
    lt = cf.lam * t
    if isinstance(ch, NoiseModelII):
        e, f = ch.eta, ch.eta_prime
        trx = (1 - 2 * e) * lt[0] + (1 - 2 * f) * lt[1] - (1 - 2 * e) * (1 - 2 * f) * lt[2]
    else:
        _, p1, p2, p3 = as_model_I(ch).p
        trx = 2 * p1 * (lt[0] + lt[2]) + 2 * p2 * (lt[1] + lt[2]) + 2 * p3 * (lt[0] + lt[1]) - lt.sum()
    return 0.5 * (1 + trx / 3)


def _require_negative(cf: CanonicalForm):
    if cf.det_sign is not DetSign.NEGATIVE:
        raise ScopeError(
            f"condition not applicable: defined only for det T < 0 (got {cf.det_sign.name.lower()})"
        )


def nonclassical_condition(cf: CanonicalForm, ch) -> tuple[bool, float]:
    """(sum t > 1 + 2 f_noise, f_noise) for a negative-determinant resource."""
    _require_negative(cf)
    fn = noise_term(cf, ch)
    return bool(cf.t.sum() > 1 + 2 * fn), float(fn)


def _zero_deviation_terms(cf: CanonicalForm, ch) -> np.ndarray:
    t1, t2, t3 = cf.t
    if isinstance(ch, NoiseModelII):
        e, f = 2 * ch.eta - 1, 2 * ch.eta_prime - 1
        return np.array([t1 * e, t2 * f, t3 * e * f])
    _, p1, p2, p3 = as_model_I(ch).p
    return np.array([t1 * (1 - 2 * (p1 + p3)), t2 * (1 - 2 * (p2 + p3)), t3 * (1 - 2 * (p1 + p2))])


def zero_deviation_condition(cf: CanonicalForm, ch) -> np.ndarray:
    """Pairwise differences (q1 - q2, q2 - q3) of the three per-axis terms."""
    _require_negative(cf)
    q = _zero_deviation_terms(cf, ch)
    return np.array([q[0] - q[1], q[1] - q[2]])


@dataclass(frozen=True)
class DispersionFreeChannel:
    channel: NoiseModelI
    F: float
    nonclassical: bool


def _parse_fixed(fixed) -> dict[int, float]:
    out = {}
    for key, value in dict(fixed).items():
        idx = int(key[1:]) if isinstance(key, str) else int(key)
        if idx not in range(4):
            raise ParameterError(f"unknown channel parameter {key!r}")
        v = float(value)
        if not 0 <= v <= 1:
            raise InfeasibleError(f"p{idx} = {v:g} violates 0 <= p{idx} <= 1")
        out[idx] = v
    return out


def find_dispersion_free_channel(cf: CanonicalForm, fixed) -> DispersionFreeChannel:
    """Model I channel that makes the standard protocol dispersion-free.

    ``fixed`` pins some of p0..p3 (keys 0..3 or "p0".."p3"). The zero-deviation
    conditions are linear in p, so the remaining freedom is a polytope; when it
    is not a single point the channel with the highest fidelity is returned.
    """
    _require_negative(cf)
    fixed = _parse_fixed(fixed)
    t1, t2, t3 = cf.t
    # q_a = t_a * (1 - 2 * c_a . p), rows of c_a select the flipping patterns
    flips = np.array([[0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]], dtype=float)
    t = np.array([t1, t2, t3])
    q_lin = -2 * t[:, None] * flips  # q_a = t_a + q_lin[a] . p  (using sum p = 1)
    rows = [q_lin[0] - q_lin[1], q_lin[1] - q_lin[2], np.ones(4)]
    rhs = [t[1] - t[0], t[2] - t[1], 1.0]
    for idx, v in fixed.items():
        e = np.zeros(4)
        e[idx] = 1
        rows.append(e)
        rhs.append(v)
    A, b = np.array(rows), np.array(rhs)

    # maximise F = const - f_noise / 3, i.e. minimise f_noise
    cost = np.array([0.0, t1 + t3, t2 + t3, t1 + t2])
    res = linprog(cost, A_eq=A, b_eq=b, bounds=[(0, 1)] * 4, method="highs")
    if res.status != 0:
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.max(np.abs(A @ sol - b)) > 1e-9:
            raise InfeasibleError("zero-deviation conditions are inconsistent with the fixed values")
        bad = [f"p{i} = {v:.6g} < 0" for i, v in enumerate(sol) if v < -1e-12]
        bad += [f"p{i} = {v:.6g} > 1" for i, v in enumerate(sol) if v > 1 + 1e-12]
        raise InfeasibleError("infeasible: " + (", ".join(bad) or "no point of the simplex"))
    p = np.clip(res.x, 0, None)
    for idx, v in fixed.items():
        p[idx] = v
    ch = NoiseModelI(p / p.sum())
    F = fidelity(cf, ch)
    return DispersionFreeChannel(ch, F, F > CLASSICAL_LIMIT)


def analyze(cf: CanonicalForm, ch, strat: CorrectionStrategy = STANDARD) -> FidelityReport:
    chi = chi_matrix(cf, ch, strat)
    F = _fidelity_from_chi(chi)
    D = _deviation_from_chi(chi)
    noiseless = _fidelity_from_chi(chi_matrix(cf, NoiseModelI.noiseless(), STANDARD))
    return FidelityReport(
        F=F,
        Delta=D,
        nonclassical=F > CLASSICAL_LIMIT,
        dispersion_free=D <= DISPERSION_TOL,
        f_noise=3 * (noiseless - F),
        strategy=strat,
    )


# Named families -------------------------------------------------------------

_SQRT10 = math.sqrt(10)


def werner_formulas(epsilon: float, ch) -> tuple[float, float]:
    """(F, Delta) for eps |phi0><phi0| + (1 - eps) I / 4, 1/3 < eps <= 1."""
    if not 1 / 3 < epsilon <= 1:
        raise ParameterError(f"Werner formulas need 1/3 < epsilon <= 1, got {epsilon}")
    p0, p1, p2, p3 = as_model_I(ch).p
    F = (3 - epsilon + 4 * epsilon * p0) / 6
    conc = (3 * epsilon - 1) / 2
    spread = math.sqrt((p1 - p2) ** 2 + (p1 - p3) ** 2 + (p2 - p3) ** 2)
    return F, (4 * conc + 2) / (9 * _SQRT10) * spread


def pure_state_formulas(a: float, ch) -> tuple[float, float]:
    """(F, Delta) for a|00> + b|11>, 0 < a < 1."""
    if not 0 < a < 1:
        raise ParameterError(f"pure-state formulas need 0 < a < 1, got {a}")
    b = math.sqrt(1 - a * a)
    ab = a * b
    if isinstance(ch, NoiseModelII):
        e, f = ch.eta, ch.eta_prime
        F = 2 / 3 * (1 + ab) - (2 * ab * (2 - e - f) + (e + f - 2 * e * f)) / 3
        inner = (
            16 * ab**2 * (e - f) ** 2
            + (2 * f - 1) ** 2 * (2 * ab - 2 * e + 1) ** 2
            + (2 * e - 1) ** 2 * (2 * ab - 2 * f + 1) ** 2
        )
        return F, math.sqrt(inner) / (3 * _SQRT10)
    p0, p1, p2, p3 = as_model_I(ch).p
    F = 2 / 3 * (1 + ab) - (p1 + p2 + 2 * ab * (p1 + p2 + 2 * p3)) / 3
    u = p0 + p2 - p1 - p3
    v = p0 + p1 - p2 - p3
    w = p0 + p3 - p1 - p2
    inner = u**2 * 4 * ab**2 + v**2 * 4 * ab**2 + w**2 - (u * 2 * ab + v * 2 * ab + w) ** 2 / 3
    return F, math.sqrt(max(inner, 0.0)) / math.sqrt(30)
