"""Noisy classical channels carrying Alice's two-bit message."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .protocol import bits_message, message_bits

PROB_TOL = 1e-12


def xlog2x(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


@dataclass(frozen=True)
class NoiseModelI:
    """Single two-bit channel.

    ``p = (p0, p1, p2, p3)``: message intact, first bit flipped, second bit
    flipped, both flipped.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (4,):
            raise ValidationError(f"Noise Model I needs four probabilities, got {p.shape[0]}")
        if not np.all(np.isfinite(p)) or np.any(p < -PROB_TOL):
            raise ValidationError(f"probabilities must be non-negative, got {p.tolist()}")
        if abs(p.sum() - 1) > PROB_TOL:
            raise ValidationError(f"probabilities must sum to 1, got {p.sum():.15g}")
        p = np.clip(p, 0, None)
        p = p / p.sum()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def noiseless(cls) -> NoiseModelI:
        return cls((1.0, 0.0, 0.0, 0.0))

    def __iter__(self):
        return iter(self.p)


@dataclass(frozen=True)
class NoiseModelII:
    """Two independent binary channels, correct with probability eta, eta'."""

    eta: float
    eta_prime: float

    def __post_init__(self):
        for name in ("eta", "eta_prime"):
            v = float(getattr(self, name))
            if not 0.5 <= v <= 1:
                raise ValidationError(f"{name} must lie in [1/2, 1], got {v}")
            object.__setattr__(self, name, v)


def as_model_I(ch) -> NoiseModelI:
    """Accept either model (or a raw probability vector) and return Model I."""
    if isinstance(ch, NoiseModelI):
        return ch
    if isinstance(ch, NoiseModelII):
        return model_II_to_I(ch)
    return NoiseModelI(ch)


def mutual_info_I(ch: NoiseModelI) -> float:
    """2 + sum_i p_i log2 p_i, in bits."""
    return float(2 + xlog2x(ch.p).sum())


def binary_entropy(x) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    h = -(xlog2x(x) + xlog2x(1 - x))
    return float(h) if h.ndim == 0 else h


def mutual_info_II(ch: NoiseModelII) -> tuple[float, float]:
    """Per-channel information 1 - H(l) for l = eta, eta'."""
    return 1 - binary_entropy(ch.eta), 1 - binary_entropy(ch.eta_prime)


def model_II_to_I(ch: NoiseModelII) -> NoiseModelI:
    e, f = ch.eta, ch.eta_prime
    return NoiseModelI((e * f, (1 - e) * f, e * (1 - f), (1 - e) * (1 - f)))


def sample_patterns(ch: NoiseModelI, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` error-pattern indices (0..3) with probabilities ``ch.p``."""
    return rng.choice(4, size=n, p=ch.p)


# pattern index -> XOR mask on the message bits (first bit is the high bit)
PATTERN_MASKS = np.array([0b00, 0b10, 0b01, 0b11])


def sample_transition(ch: NoiseModelI, sent: str, rng: np.random.Generator) -> str:
    """Message Bob receives when ``sent`` goes through the channel once."""
    bits = message_bits(sent)
    i = int(rng.choice(4, p=ch.p))
    return bits_message(bits ^ int(PATTERN_MASKS[i]))
