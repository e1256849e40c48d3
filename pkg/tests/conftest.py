import numpy as np
import pytest

from ortho_block import Measure, Polynomial, RecurrenceSystem


def random_system(rng, N, length):
    """Random (2N+1)-term system: complex c[n,k], |c[n,N]| in [0.5, 2]."""
    h = Polynomial(np.r_[rng.uniform(-0.5, 0.5, N), 1.0])
    c0 = rng.uniform(-0.5, 0.5, length)
    c = rng.uniform(0, 0.3, (length, N)) * np.exp(2j * np.pi * rng.random((length, N)))
    c[:, N - 1] = rng.uniform(0.5, 2.0, length) * np.exp(2j * np.pi * rng.random(length))
    return RecurrenceSystem(N, h, c0, c)


def random_hermitian(rng, N, scale=0.5):
    M = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    return scale * (M + M.conj().T) / 2


def random_matrix(rng, N):
    return rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def chebyshev():
    return Measure.chebyshev(200)


ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        print(ACCEPTANCE_LINES[number])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
