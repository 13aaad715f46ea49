"""Shared fixtures: expensive spectral computations cached per session."""

import math

import numpy as np
import pytest

from diracspec.core import Grid, PotentialMatrix
from diracspec.eigen import find_eigenvalues, norming_constants


@pytest.fixture(scope="session")
def grid_pi():
    return Grid(0.0, math.pi, 2048)


@pytest.fixture(scope="session")
def sin_pot(grid_pi):
    return PotentialMatrix(None, lambda x: np.sin(x), grid_pi)


@pytest.fixture(scope="session")
def sin_data_40(sin_pot):
    """Spectrum and norming constants of q = sin x at alpha = beta = 0, |n| <= 45."""
    data = find_eigenvalues(sin_pot, 0.0, 0.0, -45, 45)
    return norming_constants(sin_pot, 0.0, data)


@pytest.fixture(scope="session")
def sin_data_220(sin_pot):
    """Wide window used by truncated-product and expansion tests."""
    data = find_eigenvalues(sin_pot, 0.0, 0.0, -220, 220)
    return norming_constants(sin_pot, 0.0, data)


@pytest.fixture(scope="session")
def sin_spec_eps220(sin_pot):
    """Second spectrum of q = sin x at the angle pi/4 (lambda only)."""
    return find_eigenvalues(sin_pot, math.pi / 4, 0.0, -220, 220)


@pytest.fixture(scope="session")
def sin_gl_data(sin_data_220):
    """Restriction of the sin-potential data to |n| <= 70 for reconstruction."""
    from diracspec.eigen import SpectralData

    items = {n: d for n, d in sin_data_220.items.items() if abs(n) <= 70}
    return SpectralData(sin_data_220.angles, items)
