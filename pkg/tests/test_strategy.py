import numpy as np
import pytest

from noisytele import strategy
from noisytele.canonical import CanonicalForm, DetSign
from noisytele.channels import NoiseModelI, NoiseModelII
from noisytele.protocol import PAULI_ROTATION_DIAG, REGIME_STRATEGIES, STANDARD, TABLE3, TABLE4, TABLE5, TABLE6
from noisytele.telefid import fidelity

from conftest import random_channel, random_negative_cf

BELL = CanonicalForm.from_magnitudes((1, 1, 1))


def _pauli_rotations(strat):
    return np.array([np.diag(PAULI_ROTATION_DIAG[c]) for c in strat.assignment])


@pytest.mark.parametrize(
    "p, expected",
    [
        ((0.7, 0.1, 0.1, 0.1), TABLE3),
        ((0.1, 0.7, 0.1, 0.1), TABLE4),
        ((0.1, 0.1, 0.7, 0.1), TABLE5),
        ((0.1, 0.1, 0.1, 0.7), TABLE6),
        ((0.4, 0.4, 0.1, 0.1), TABLE3),  # ties go to the lower pattern
        ((0.1, 0.4, 0.4, 0.1), TABLE4),
    ],
)
def test_regime_choice(p, expected):
    assert strategy.regime_strategy(NoiseModelI(p)) == expected


def test_regime_formulas_match_their_tables(rng):
    for _ in range(2000):
        cf = random_negative_cf(rng)
        ch = random_channel(rng)
        strat = strategy.regime_strategy(ch)
        assert strategy.regime_fidelity(cf, ch) == pytest.approx(fidelity(cf, ch, strat), abs=1e-12)


def test_regime_bell_values():
    for j, table in enumerate(REGIME_STRATEGIES):
        p = np.full(4, 0.1)
        p[j] = 0.7
        assert fidelity(BELL, NoiseModelI(p), table) == pytest.approx((1 + 2 * 0.7) / 3)


def test_exhaustive_search_table():
    search = strategy.fidelity_over_all_strategies(BELL, NoiseModelI.noiseless())
    assert len(search.table) == 256
    assert search.best.assignment == STANDARD.assignment and search.F == pytest.approx(1.0)
    assert min(search.table) == pytest.approx(1 / 3)  # every outcome gets a wrong Pauli


def test_exhaustive_values_match_direct_evaluation(rng):
    from noisytele.protocol import all_strategies

    cf = random_negative_cf(rng)
    ch = random_channel(rng)
    search = strategy.fidelity_over_all_strategies(cf, ch)
    for s, F in zip(all_strategies(), search.table):
        assert F == pytest.approx(fidelity(cf, ch, s), abs=1e-12)


def test_best_of_four_is_global_optimum(rng):
    for _ in range(1000):
        cf = random_negative_cf(rng)
        ch = random_channel(rng) if rng.random() < 0.7 else NoiseModelII(*rng.uniform(0.5, 1, 2))
        _, F4 = strategy.optimal_fidelity(cf, ch)
        assert F4 == pytest.approx(strategy.fidelity_over_all_strategies(cf, ch).F, abs=1e-12)


def test_dominant_pattern_is_not_always_optimal():
    """A documented counterexample: the dominant pattern picks the wrong table."""
    cf = CanonicalForm.from_magnitudes((0.9, 0.05, 0.05))
    ch = NoiseModelI((0.4, 0.3, 0.05, 0.25))
    assert strategy.regime_strategy(ch) == TABLE3
    assert strategy.regime_fidelity(cf, ch) == pytest.approx(0.49083333333, abs=1e-10)
    best, F = strategy.optimal_fidelity(cf, ch)
    assert best == TABLE4 and F == pytest.approx(0.51583333333, abs=1e-10)


def test_regime_strategy_optimal_for_equal_magnitudes(rng):
    for _ in range(500):
        t = rng.uniform(0, 1)
        cf = CanonicalForm.from_magnitudes((t, t, t))
        ch = random_channel(rng)
        assert strategy.regime_fidelity(cf, ch) == pytest.approx(
            strategy.fidelity_over_all_strategies(cf, ch).F, abs=1e-12)


def test_positive_branch_uses_search():
    cf = CanonicalForm.from_magnitudes((0.8, 0.5, 0.2), DetSign.POSITIVE)
    ch = NoiseModelI((0.7, 0.1, 0.15, 0.05))
    assert strategy.regime_fidelity(cf, ch) == strategy.fidelity_over_all_strategies(cf, ch).F


def test_identity_rotations():
    # doing nothing averages the four Bell correlations away
    R = np.broadcast_to(np.eye(3), (4, 3, 3))
    assert strategy.rotation_fidelity(BELL, NoiseModelI.noiseless(), R) == pytest.approx(0.5)


def test_pauli_rotations_reproduce_tables(rng):
    for _ in range(100):
        cf = random_negative_cf(rng)
        ch = random_channel(rng)
        for table in REGIME_STRATEGIES:
            F = strategy.rotation_fidelity(cf, ch, _pauli_rotations(table))
            assert F == pytest.approx(fidelity(cf, ch, table), abs=1e-12)


def test_rotation_margin_zero_for_table3_rotations():
    cf = random_negative_cf(np.random.default_rng(3))
    ch = NoiseModelI((0.7, 0.1, 0.1, 0.1))
    F = strategy.rotation_fidelity(cf, ch, _pauli_rotations(TABLE3))
    assert strategy.regime_fidelity(cf, ch) - F == pytest.approx(0.0, abs=1e-14)


def test_random_rotations_never_beat_best_table(rng):
    for _ in range(20):
        cf = random_negative_cf(rng)
        ch = random_channel(rng)
        _, F4 = strategy.optimal_fidelity(cf, ch)
        margin = strategy.random_rotation_check(cf, ch, 20_000, rng)
        assert strategy.regime_fidelity(cf, ch) - margin <= F4 + 1e-12


def test_rotation_triple_is_proper(rng):
    for _ in range(100):
        R = strategy.RotationTriple(tuple(rng.uniform(0, 2 * np.pi, 3))).matrix
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0)
    assert np.allclose(strategy.euler_rotation(0, 0, 0), np.eye(3))


def test_sampled_diagonals_match_matrices():
    a = strategy.sample_rotations(100, np.random.default_rng(5))
    d = strategy._sample_rotation_diagonals(100, np.random.default_rng(5))
    assert np.allclose(np.diagonal(a, axis1=-2, axis2=-1), d)


def test_random_rotation_check_validates():
    with pytest.raises(ValueError):
        strategy.random_rotation_check(BELL, NoiseModelI.noiseless(), 0, np.random.default_rng(0))
