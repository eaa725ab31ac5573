"""Shared fixtures: the worked three-sensor plant used across the suite."""

import pytest

from sentinel.polyalg import PolyMatrix

# Three-sensor plant driven by y(t+1) = A y(t); one real mode at 1/2 plus a
# marginally stable complex pair on the unit circle.
CUBIC_A = [["0", "1", "0"], ["0", "0", "1"], ["1/2", "-3/2", "3/2"]]

CUBIC_KERNEL = [
    ["x", "-1", "0"],
    ["0", "x", "-1"],
    ["-1/2", "3/2", "x-3/2"],
]

CUBIC_CANONICAL = [
    ["1", "0", "-6x^2+7x-6"],
    ["0", "1", "-2x^2+3x-3"],
    ["0", "0", "x^3-3/2x^2+3/2x-1/2"],
]


@pytest.fixture
def cubic_kernel():
    return PolyMatrix.from_strings(CUBIC_KERNEL)


@pytest.fixture
def cubic_canonical():
    return PolyMatrix.from_strings(CUBIC_CANONICAL)
