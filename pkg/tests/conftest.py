import numpy as np
import pytest

from blochpovm.su_basis import generate_su_basis, structure_constants

_BASES = {}
_CONSTANTS = {}
ACCEPTANCE_LINES = []


def basis_for(d):
    if d not in _BASES:
        _BASES[d] = generate_su_basis(d)
    return _BASES[d]


def constants_for(d):
    if d not in _CONSTANTS:
        _CONSTANTS[d] = structure_constants(basis_for(d))
    return _CONSTANTS[d]


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def basis():
    return basis_for


@pytest.fixture
def constants():
    return constants_for


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
