import numpy as np
import pytest

from hiddentime.cli import random_kinematics

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Record one acceptance criterion outcome for the terminal summary."""

    def _record(criterion: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")


@pytest.fixture(scope="session")
def kinematics_1000():
    return random_kinematics(np.random.default_rng(12345), 1000)


@pytest.fixture
def gammas():
    from hiddentime.dirac_verify import standard_gamma_set

    return standard_gamma_set()


# Literal Dirac-representation matrices, typed in independently of the package.
GAMMA_ORACLE = np.array(
    [
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
        [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
        [[0, 0, 0, -1j], [0, 0, 1j, 0], [0, 1j, 0, 0], [-1j, 0, 0, 0]],
        [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]],
    ],
    dtype=complex,
)


def oracle_residual(u, E, p, m, sign=+1):
    """|| (gamma^0 E - gamma.p - sign*m) u || with the literal matrices above."""
    slash = GAMMA_ORACLE[0] * E - sum(GAMMA_ORACLE[i + 1] * p[i] for i in range(3))
    return float(np.linalg.norm((slash - sign * m * np.eye(4)) @ np.asarray(u)))
