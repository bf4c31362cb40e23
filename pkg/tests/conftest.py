import numpy as np
import pytest

from noisytele.canonical import DetSign, canonicalize
from noisytele.channels import NoiseModelI
from noisytele.qstate import random_state

ACCEPTANCE_LINES = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_cf(rng, det_sign=None, max_tries=1000):
    """Canonical form of a random state, optionally with a prescribed det sign."""
    for _ in range(max_tries):
        cf, _ = canonicalize(random_state(rng, rank=int(rng.integers(1, 5))))
        if det_sign is None or cf.det_sign is det_sign:
            return cf
    raise RuntimeError("no state with the requested determinant sign")


def random_negative_cf(rng):
    return random_cf(rng, DetSign.NEGATIVE)


def random_channel(rng):
    return NoiseModelI(rng.dirichlet(np.ones(4)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
