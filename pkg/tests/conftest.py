import math
from pathlib import Path

import numpy as np
import pytest

from qmeter import SIGMA_Z, Ket, basis_to_povm, x_basis, z_basis

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
THETA = math.pi / 8


@pytest.fixture
def psi_pi8():
    return Ket([math.cos(THETA), math.sin(THETA)])


@pytest.fixture
def psi_complex():
    return Ket(np.array([1, 1j]) / math.sqrt(2))


@pytest.fixture
def x_povm():
    return basis_to_povm(x_basis())


@pytest.fixture
def z_povm():
    return basis_to_povm(z_basis())


@pytest.fixture
def sz():
    return SIGMA_Z


@pytest.fixture
def scenario_dir():
    return SCENARIOS


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion, then assert it."""
    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))
        assert ok, f"{name}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
