import itertools

import numpy as np
import pytest
from scipy.stats import chisquare

from noisytele.channels import (
    NoiseModelI,
    NoiseModelII,
    as_model_I,
    binary_entropy,
    model_II_to_I,
    mutual_info_I,
    mutual_info_II,
    sample_patterns,
    sample_transition,
)
from noisytele.errors import ValidationError

# arbitrary-precision evaluations (mpmath, 30 digits)
MI_0_6_0_2_0_15_0_05 = 0.466793780653504788
MI_BINARY_0_9 = 0.531004406410718779


def test_mutual_info_I_values():
    assert mutual_info_I(NoiseModelI((1, 0, 0, 0))) == 2.0
    assert mutual_info_I(NoiseModelI((0.25,) * 4)) == pytest.approx(0.0, abs=1e-15)
    assert mutual_info_I(NoiseModelI((0.6, 0.2, 0.15, 0.05))) == pytest.approx(MI_0_6_0_2_0_15_0_05, abs=1e-14)


def test_mutual_info_I_full_symmetry():
    p = (0.6, 0.2, 0.15, 0.05)
    ref = mutual_info_I(NoiseModelI(p))
    for perm in itertools.permutations(p):
        assert mutual_info_I(NoiseModelI(perm)) == pytest.approx(ref, abs=1e-14)


def test_mutual_info_II_values():
    assert mutual_info_II(NoiseModelII(1, 1)) == (1.0, 1.0)
    assert mutual_info_II(NoiseModelII(0.5, 0.5)) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert mutual_info_II(NoiseModelII(0.9, 0.9))[0] == pytest.approx(MI_BINARY_0_9, abs=1e-14)


def test_binary_entropy_limits():
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "eta, eta_p, expected",
    [(1, 1, (1, 0, 0, 0)), (0.5, 0.5, (0.25,) * 4), (0.9, 0.8, (0.72, 0.08, 0.18, 0.02))],
)
def test_model_II_to_I(eta, eta_p, expected):
    assert np.allclose(model_II_to_I(NoiseModelII(eta, eta_p)).p, expected, atol=1e-15)


def test_information_additivity():
    for e in np.linspace(0.5, 1, 20):
        for f in np.linspace(0.5, 1, 20):
            ch = NoiseModelII(e, f)
            assert mutual_info_I(model_II_to_I(ch)) == pytest.approx(sum(mutual_info_II(ch)), abs=1e-10)


def test_validation():
    with pytest.raises(ValidationError, match="sum to 1"):
        NoiseModelI((0.5, 0.5, 0.5, 0))
    with pytest.raises(ValidationError, match="non-negative"):
        NoiseModelI((1.1, -0.1, 0, 0))
    with pytest.raises(ValidationError, match="four"):
        NoiseModelI((1, 0, 0))
    with pytest.raises(ValidationError):
        NoiseModelII(0.4, 0.9)
    # rounding within tolerance is accepted and renormalised
    ch = NoiseModelI((0.7, 0.1, 0.1, 0.1 + 5e-13))
    assert ch.p.sum() == pytest.approx(1.0, abs=1e-15)


def test_as_model_I_accepts_vectors():
    assert isinstance(as_model_I((1, 0, 0, 0)), NoiseModelI)


def test_deterministic_transitions(rng):
    for _ in range(50):
        assert sample_transition(NoiseModelI((1, 0, 0, 0)), "01", rng) == "01"
        assert sample_transition(NoiseModelI((0, 1, 0, 0)), "01", rng) == "11"
        assert sample_transition(NoiseModelI((0, 0, 1, 0)), "01", rng) == "00"
        assert sample_transition(NoiseModelI((0, 0, 0, 1)), "01", rng) == "10"


def test_pattern_frequencies(rng):
    p = np.array([0.6, 0.2, 0.15, 0.05])
    n = 10**6
    counts = np.bincount(sample_patterns(NoiseModelI(p), n, rng), minlength=4)
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 3 * sigma + 1)
    assert chisquare(counts, n * p).pvalue > 0.001


def test_transition_frequencies(rng):
    ch = NoiseModelI((0.6, 0.2, 0.15, 0.05))
    n = 20_000
    got = [sample_transition(ch, "00", rng) for _ in range(n)]
    counts = np.array([got.count(m) for m in ("00", "10", "01", "11")])
    assert chisquare(counts, n * ch.p).pvalue > 0.001
