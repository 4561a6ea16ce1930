import numpy as np
import pytest

from clusteresd import analysis


def random_density(n_qubits, rng, rank=None):
    """Random density matrix as M M^dag / Tr, with M of the given column rank."""
    d = 1 << n_qubits
    m = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_ket(n_qubits, rng):
    d = 1 << n_qubits
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def table1():
    return analysis.table1_report()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
