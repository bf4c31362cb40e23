"""Two-qubit density matrices and their Pauli (Hilbert-Schmidt) coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError
from .protocol import BELL_KETS, SIGMA

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12

# PAULI_PRODUCTS[i, j] = sigma_i (x) sigma_j, i, j in 0..3
PAULI_PRODUCTS = np.einsum("iab,jcd->ijacbd", SIGMA, SIGMA).reshape(4, 4, 4, 4)


def _validate_density(matrix: np.ndarray) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.shape != (4, 4):
        raise ValidationError(f"density matrix must be 4x4, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("density matrix has non-finite entries")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > HERMITIAN_TOL:
        raise ValidationError(f"not Hermitian: max |rho - rho^dagger| = {asym:.3g}")
    m = (m + m.conj().T) / 2
    tr = np.trace(m).real
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError(f"trace must be 1, got {tr:.15g}")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -PSD_TOL:
        raise ValidationError(f"not positive semidefinite: smallest eigenvalue {lo:.3g}")
    return m


@dataclass(frozen=True)
class TwoQubitState:
    """Validated 4x4 density operator (Alice's qubit first)."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _validate_density(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_ket(cls, ket) -> TwoQubitState:
        v = np.asarray(ket, dtype=complex).reshape(4)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True)
class PauliDecomposition:
    R: np.ndarray
    S: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(3)
        S = np.asarray(self.S, dtype=float).reshape(3)
        T = np.asarray(self.T, dtype=float).reshape(3, 3)
        for name, v in (("R", R), ("S", S)):
            if np.linalg.norm(v) > 1 + PSD_TOL:
                raise ValidationError(f"|{name}| = {np.linalg.norm(v):.6g} exceeds 1")
        if np.max(np.abs(T), initial=0) > 1 + PSD_TOL:
            raise ValidationError("correlation matrix entry outside [-1, 1]")
        for a in (R, S, T):
            a.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "T", T)


@dataclass(frozen=True)
class InputQubit:
    """Pure input state |psi><psi| = (I + a.sigma)/2 with unit Bloch vector a."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(3)
        if abs(np.linalg.norm(a) - 1) > NORM_TOL:
            raise ValidationError(f"Bloch vector must be unit length, |a| = {np.linalg.norm(a):.15g}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def density(self) -> np.ndarray:
        return bloch_to_density(self.a)


def bloch_to_density(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return 0.5 * (SIGMA[0] + np.einsum("i,iab->ab", a, SIGMA[1:]))


def pauli_decompose(state: TwoQubitState) -> PauliDecomposition:
    """Return R_i = Tr(rho s_i x I), S_j = Tr(rho I x s_j), T_ij = Tr(rho s_i x s_j)."""
    if not isinstance(state, TwoQubitState):
        state = TwoQubitState(state)
    coeff = np.einsum("ijab,ba->ij", PAULI_PRODUCTS, state.matrix).real
    return PauliDecomposition(coeff[1:, 0], coeff[0, 1:], coeff[1:, 1:])


def reconstruct(decomp: PauliDecomposition) -> TwoQubitState:
    coeff = np.zeros((4, 4))
    coeff[0, 0] = 1
    coeff[1:, 0] = decomp.R
    coeff[0, 1:] = decomp.S
    coeff[1:, 1:] = decomp.T
    m = np.einsum("ij,ijab->ab", coeff, PAULI_PRODUCTS) / 4
    try:
        return TwoQubitState(m)
    except ValidationError as exc:
        raise ValidationError(f"unphysical decomposition: {exc}") from None


def concurrence(state: TwoQubitState) -> float:
    """Wootters concurrence.

    The lambda_i are the singular values of sqrt(rho) sqrt(rho~), which avoids
    square roots of tiny, possibly negative eigenvalues of rho rho~.
    """
    w, v = np.linalg.eigh(state.matrix)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    yy = np.kron(SIGMA[2], SIGMA[2])
    lam = np.linalg.svd(root @ yy @ root.conj() @ yy, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


@dataclass(frozen=True)
class StateFamilySpec:
    """Description of a resource state.

    ``kind`` is one of ``dense``, ``pure``, ``werner`` or ``tdiag``; ``params``
    holds the variant's fields (``matrix``; ``a``; ``epsilon``; ``t``, ``r``, ``s``).
    """

    kind: str
    params: dict = field(default_factory=dict)


def pure_state(a: float) -> TwoQubitState:
    """a|00> + b|11> with b = sqrt(1 - a^2)."""
    if not 0 <= a <= 1:
        raise ParameterError(f"pure family needs 0 <= a <= 1, got {a}")
    b = np.sqrt(max(0.0, 1 - a * a))
    return TwoQubitState.from_ket([a, 0, 0, b])


def werner_state(epsilon: float) -> TwoQubitState:
    if not 0 <= epsilon <= 1:
        raise ParameterError(f"Werner family needs 0 <= epsilon <= 1, got {epsilon}")
    phi0 = np.outer(BELL_KETS[0], BELL_KETS[0].conj())
    return TwoQubitState(epsilon * phi0 + (1 - epsilon) * np.eye(4) / 4)


def make_family(spec: StateFamilySpec) -> TwoQubitState:
    p = spec.params
    if spec.kind == "pure":
        return pure_state(float(p["a"]))
    if spec.kind == "werner":
        return werner_state(float(p["epsilon"]))
    if spec.kind == "dense":
        return TwoQubitState(np.asarray(p["matrix"], dtype=complex).reshape(4, 4))
    if spec.kind == "tdiag":
        t = np.asarray(p["t"], dtype=float)
        if t.shape != (3,):
            raise ParameterError("tdiag needs three correlation diagonals")
        r = p.get("r", (0, 0, 0))
        s = p.get("s", (0, 0, 0))
        try:
            return reconstruct(PauliDecomposition(r, s, np.diag(t)))
        except ValidationError as exc:
            raise ParameterError(str(exc)) from None
    raise ParameterError(f"unknown state family {spec.kind!r}")


def random_state(rng: np.random.Generator, rank: int = 4) -> TwoQubitState:
    """G G^dagger / Tr for a complex Gaussian 4 x rank matrix G."""
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = g @ g.conj().T
    return TwoQubitState(m / np.trace(m).real)
