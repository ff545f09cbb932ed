import numpy as np
import pytest

from phasebounds.frames import PAULI, make_frame

ACCEPTANCE_LINES = []


def cgauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_herm(rng, n):
    G = cgauss(rng, (n, n))
    return (G + G.conj().T) / 2


def unit(v):
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


@pytest.fixture
def pauli():
    return make_frame(PAULI)


@pytest.fixture
def pauli_psd():
    I, X, Y, Z = PAULI
    return make_frame([(I + X) / 2, (I - X) / 2, (I + Y) / 2, (I + Z) / 2])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
