import numpy as np
import pytest

from mobpomp import Triangle

SQ3 = np.sqrt(3.0)

# a = 4 > c = 3 > b = 2
PICTURE1_VERTICES = [[0.0, 0.0], [3.0, 0.0], [-0.5, np.sqrt(3.75)]]
# chordal sides b > c > a with a nonvanishing leading quartic coefficient
PICTURE3_VERTICES = [[0.0, 0.0], [2.0, 0.5], [1.5, 1.5]]


def unit_equilateral():
    """Equilateral triangle inscribed in the unit circle (vertices at 90, 210, 330 degrees)."""
    ang = np.deg2rad([90.0, 210.0, 330.0])
    return np.column_stack([np.cos(ang), np.sin(ang)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def right_isoceles():
    return Triangle.from_vertices([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def equilateral():
    return Triangle.from_vertices([[0, 0], [1, 0], [0.5, SQ3 / 2]])


@pytest.fixture
def picture1():
    return Triangle.from_vertices(PICTURE1_VERTICES)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, title, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
