from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE_LINES = []


def random_hermitian(rng, d, scale=1.0):
    X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (X + X.conj().T) / 2


def random_psd(rng, d, rank=None):
    G = rng.standard_normal((d, rank or d)) + 1j * rng.standard_normal((d, rank or d))
    return G @ G.conj().T


def random_pd(rng, d, floor=0.2):
    return random_psd(rng, d) + floor * np.eye(d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
