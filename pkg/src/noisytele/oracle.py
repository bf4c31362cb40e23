"""First-principles simulation of teleportation over a noisy classical channel.

Nothing here uses the closed forms of ``telefid``. Bob's conditional states
come from projecting input (x) resource onto Alice's Bell basis and tracing
out her two qubits; the channel and corrections are then applied as explicit
2x2 matrix operations. The whole protocol is a linear map on the input
density matrix, which makes both exact sphere averages and fast Monte Carlo
possible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalForm
from .channels import as_model_I, sample_patterns, sample_transition
from .protocol import BELL_KETS, MESSAGES, RECEIVED, SIGMA, CorrectionStrategy
from .qstate import InputQubit, TwoQubitState

PROB_ZERO = 1e-15
NORM_REJECT = 1e-8
CHUNK = 1 << 16

_BELL = BELL_KETS.reshape(4, 2, 2)


def _as_state(state) -> TwoQubitState:
    if isinstance(state, CanonicalForm):
        return state.state()
    if isinstance(state, TwoQubitState):
        return state
    return TwoQubitState(state)


def _bob_unnormalised(resource: np.ndarray, rho_in: np.ndarray) -> np.ndarray:
    """s_k * rho_k for k = 0..3, shape (4, 2, 2). ``rho_in`` may be any 2x2 matrix."""
    full = np.kron(rho_in, resource).reshape(2, 2, 2, 2, 2, 2)
    return np.einsum("kxy,xybuvc,kuv->kbc", _BELL.conj(), full, _BELL)


@dataclass(frozen=True)
class ProtocolOutcome:
    k: int
    s_k: float
    post_state: np.ndarray | None  # None when s_k vanishes

    @property
    def possible(self) -> bool:
        return self.post_state is not None


def bell_measure(resource, inp: InputQubit) -> list[ProtocolOutcome]:
    """Outcome probabilities and Bob's normalised conditional states."""
    rho = _as_state(resource).matrix
    out = []
    for k, m in enumerate(_bob_unnormalised(rho, inp.density())):
        s = float(np.trace(m).real)
        out.append(ProtocolOutcome(k, s, m / s if s > PROB_ZERO else None))
    return out


def _correction_unitaries(strat: CorrectionStrategy) -> np.ndarray:
    """U[k, i]: Pauli Bob applies when outcome k was sent and pattern i occurred."""
    return SIGMA[np.asarray(strat.assignment)[RECEIVED]]


def _average_output(rho: np.ndarray, p: np.ndarray, strat: CorrectionStrategy, rho_in) -> np.ndarray:
    bob = _bob_unnormalised(rho, rho_in)
    U = _correction_unitaries(strat)
    return np.einsum("i,kiab,kbc,kidc->ad", p, U, bob, U.conj())


def per_input_fidelity(resource, ch, strat: CorrectionStrategy, inp: InputQubit) -> float:
    """<psi| rho_avg |psi> with rho_avg mixed over outcomes and error patterns."""
    rho = _as_state(resource).matrix
    rho_in = inp.density()
    out = _average_output(rho, as_model_I(ch).p, strat, rho_in)
    return float(np.trace(out @ rho_in).real)


def transfer_map(resource, ch, strat: CorrectionStrategy) -> tuple[np.ndarray, np.ndarray]:
    """(M, b) with Bob's average Bloch vector equal to M a + b for input a."""
    rho = _as_state(resource).matrix
    p = as_model_I(ch).p
    images = [_average_output(rho, p, strat, SIGMA[mu] / 2) for mu in range(4)]
    w = np.array([[np.trace(SIGMA[j] @ img).real for j in range(1, 4)] for img in images])
    return w[1:].T, w[0]


def _moments(M: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Uniform-sphere mean and standard deviation of (1 + a.(M a + b)) / 2.

    Only the symmetric part S of M matters: E[a.Sa] = Tr S / 3 and
    Var[a.Sa] = 2/15 |S - (Tr S / 3) I|_F^2; the linear term adds |b|^2 / 3.
    """
    S = (M + M.T) / 2
    mean_q = np.trace(S) / 3
    dev = S - mean_q * np.eye(3)
    var = (2 / 15 * np.sum(dev * dev) + b @ b / 3) / 4
    return 0.5 * (1 + mean_q), math.sqrt(var)


def exact_average(resource, ch, strat: CorrectionStrategy) -> tuple[float, float]:
    """Exact (F, Delta) from second and fourth sphere moments of the affine output."""
    return _moments(*transfer_map(resource, ch, strat))


# icosahedron vertices: a spherical 5-design, exact for polynomials up to degree 5
_G = (1 + math.sqrt(5)) / 2
ICOSAHEDRON = np.array(
    [(0, s1, s2 * _G) for s1 in (1, -1) for s2 in (1, -1)]
    + [(s1, s2 * _G, 0) for s1 in (1, -1) for s2 in (1, -1)]
    + [(s2 * _G, 0, s1) for s1 in (1, -1) for s2 in (1, -1)],
    dtype=float,
)
ICOSAHEDRON /= np.linalg.norm(ICOSAHEDRON, axis=1, keepdims=True)


def design_average(resource, ch, strat: CorrectionStrategy) -> tuple[float, float]:
    """(F, Delta) by averaging explicit per-input fidelities over a 5-design."""
    f = np.array([per_input_fidelity(resource, ch, strat, InputQubit(a)) for a in ICOSAHEDRON])
    return float(f.mean()), float(f.std())


# Monte Carlo -----------------------------------------------------------------


@dataclass(frozen=True)
class Accumulator:
    """Power sums of (f - shift); merging is addition."""

    shift: float
    n: int = 0
    s1: float = 0.0
    s2: float = 0.0
    s3: float = 0.0
    s4: float = 0.0

    @classmethod
    def of(cls, f: np.ndarray, shift: float) -> Accumulator:
        d = np.asarray(f, dtype=float) - shift
        d2 = d * d
        return cls(shift, d.size, float(d.sum()), float(d2.sum()), float((d2 * d).sum()), float((d2 * d2).sum()))

    def __add__(self, other: Accumulator) -> Accumulator:
        if other.shift != self.shift:
            raise ValueError("cannot merge accumulators with different shifts")
        return Accumulator(self.shift, self.n + other.n, self.s1 + other.s1, self.s2 + other.s2,
                           self.s3 + other.s3, self.s4 + other.s4)


@dataclass(frozen=True)
class RunStatistics:
    meanF: float
    meanF2: float
    delta: float
    n_samples: int
    std_error: float
    delta_std_error: float

    @classmethod
    def from_accumulator(cls, acc: Accumulator) -> RunStatistics:
        n = acc.n
        m1 = acc.s1 / n
        var = max(acc.s2 / n - m1 * m1, 0.0)
        mean = acc.shift + m1
        # fourth central moment from the shifted raw moments
        r2, r3, r4 = acc.s2 / n, acc.s3 / n, acc.s4 / n
        mu4 = r4 - 4 * m1 * r3 + 6 * m1 * m1 * r2 - 3 * m1**4
        delta = math.sqrt(var)
        se = math.sqrt(var / n)
        var_of_var = max(mu4 - var * var, 0.0) / n
        dse = math.sqrt(var_of_var) / (2 * delta) if delta > 0 else 0.0
        return cls(mean, var + mean * mean, delta, n, se, dse)

    def agrees_with(self, F: float, Delta: float, band: float = 5.0) -> bool:
        return (abs(self.meanF - F) <= band * self.std_error + 1e-9
                and abs(self.delta - Delta) <= band * self.delta_std_error + 1e-9)


def sample_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniform unit vectors from normalised Gaussian triples."""
    out = np.empty((n, 3))
    filled = 0
    while filled < n:
        g = rng.standard_normal((n - filled, 3))
        norm = np.linalg.norm(g, axis=1)
        ok = norm > NORM_REJECT
        g = g[ok] / norm[ok, None]
        out[filled:filled + len(g)] = g
        filled += len(g)
    return out


def _root_seed(seed) -> int:
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63))
    return int(seed)


def _chunk_rng(root: int, c: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(root, spawn_key=(c,)))


def _run_chunks(n_samples: int, seed, work, shift: float, workers: int) -> RunStatistics:
    root = _root_seed(seed)
    sizes = [min(CHUNK, n_samples - start) for start in range(0, n_samples, CHUNK)]

    def one(c):
        return Accumulator.of(work(sizes[c], _chunk_rng(root, c)), shift)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(c) for c in range(len(sizes))]
    acc = Accumulator(shift)
    for part in parts:  # fixed chunk order keeps sums bitwise reproducible
        acc = acc + part
    return RunStatistics.from_accumulator(acc)


def haar_average(resource, ch, strat: CorrectionStrategy, n_samples: int, seed=0,
                 workers: int = 1) -> RunStatistics:
    """Monte Carlo average over uniformly random pure inputs.

    Error patterns are averaged exactly. ``seed`` is an integer or a Generator
    (one 63-bit root seed is drawn from it); results depend only on the seed
    and ``n_samples``, not on ``workers``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    M, b = transfer_map(resource, ch, strat)
    z = np.array([0.0, 0.0, 1.0])
    shift = 0.5 * (1 + z @ (M @ z + b))

    def work(n, rng):
        a = sample_sphere(n, rng)
        return 0.5 * (1 + np.einsum("ni,ni->n", a, a @ M.T + b))

    return _run_chunks(n_samples, seed, work, shift, workers)


def full_sampling_average(resource, ch, strat: CorrectionStrategy, n_samples: int, seed=0,
                          workers: int = 1) -> RunStatistics:
    """Monte Carlo that also samples Alice's outcome and the channel's error pattern."""
    rho = _as_state(resource).matrix
    p = as_model_I(ch)
    # affine pieces of s_k rho_k: bob0 for the identity part, bobs[j] per Bloch axis
    bob0 = _bob_unnormalised(rho, SIGMA[0] / 2)
    bobs = np.array([_bob_unnormalised(rho, SIGMA[j] / 2) for j in range(1, 4)])
    U = _correction_unitaries(strat)

    def work(n, rng):
        a = sample_sphere(n, rng)
        unnorm = bob0[None] + np.einsum("nj,jkbc->nkbc", a, bobs)
        s = np.einsum("nkbb->nk", unnorm).real
        k = (rng.random(n)[:, None] > np.cumsum(s, axis=1)[:, :-1]).sum(axis=1)
        i = sample_patterns(p, n, rng)
        post = unnorm[np.arange(n), k] / s[np.arange(n), k, None, None]
        u = U[k, i]
        out = u @ post @ np.conj(np.swapaxes(u, -1, -2))
        bloch = np.einsum("jab,nba->nj", SIGMA[1:], out).real
        return 0.5 * (1 + np.einsum("nj,nj->n", a, bloch))

    return _run_chunks(n_samples, seed, work, 0.5, workers)


def teleport_once(resource, ch, strat: CorrectionStrategy, inp: InputQubit,
                  rng: np.random.Generator) -> float:
    """One literal run: measure, send the two bits through the channel, correct."""
    outcomes = bell_measure(resource, inp)
    probs = np.array([o.s_k for o in outcomes])
    k = int(rng.choice(4, p=probs / probs.sum()))
    received = sample_transition(as_model_I(ch), MESSAGES[k], rng)
    u = SIGMA[strat.assignment[MESSAGES.index(received)]]
    out = u @ outcomes[k].post_state @ u.conj().T
    return float(np.trace(out @ inp.density()).real)
