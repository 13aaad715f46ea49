import math

import numpy as np
import pytest

from diracspec.core import (
    BoundaryAngles,
    DomainError,
    Grid,
    GridMismatchError,
    PotentialMatrix,
    Trajectory2,
    cumulative_c,
    inner_product,
    pauli_algebra_selftest,
)


def test_grid_nodes():
    g = Grid(0.0, math.pi, 8)
    assert g.nodes.size == 9
    assert np.all(np.diff(g.nodes) > 0)
    assert np.allclose(np.diff(g.nodes), g.h)


def test_cumulative_c_zero_potential():
    g = Grid(0.0, math.pi, 256)
    assert cumulative_c(PotentialMatrix.zero(g), math.pi) == 0.0


def test_cumulative_c_linear_q():
    pot = PotentialMatrix(None, lambda x: x, Grid(0.0, math.pi, 2048))
    assert cumulative_c(pot, 2.0) == pytest.approx(2.0, abs=1e-6)


def test_cumulative_c_sin_p():
    pot = PotentialMatrix(lambda x: np.sin(x), None, Grid(0.0, math.pi, 2048))
    assert cumulative_c(pot, math.pi) == pytest.approx(2.0, abs=1e-5)


def test_cumulative_c_monotone():
    pot = PotentialMatrix(lambda x: np.sin(3 * x), lambda x: np.cos(x), Grid(0.0, math.pi, 1024))
    vals = [cumulative_c(pot, x) for x in np.linspace(0.1, math.pi, 12)]
    assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))


def test_cumulative_c_domain_error():
    pot = PotentialMatrix.zero(Grid(0.0, 1.0, 64))
    with pytest.raises(DomainError):
        cumulative_c(pot, 2.0)


def test_inner_product_unit():
    g = Grid(0.0, math.pi, 1024)
    x = g.nodes
    f = Trajectory2(g, np.sin(x), -np.cos(x))
    assert inner_product(f, f) == pytest.approx(math.pi, abs=1e-12)


def test_inner_product_pointwise_orthogonal():
    g = Grid(0.0, math.pi, 1024)
    x = g.nodes
    f = Trajectory2(g, np.sin(x), -np.cos(x))
    h = Trajectory2(g, np.cos(x), np.sin(x))
    assert abs(inner_product(f, h)) < 1e-14


def test_inner_product_mode_orthogonal():
    g = Grid(0.0, math.pi, 2048)
    x = g.nodes
    f = Trajectory2(g, np.sin(2 * x), -np.cos(2 * x))
    h = Trajectory2(g, np.sin(3 * x), -np.cos(3 * x))
    assert abs(inner_product(f, h)) < 1e-10


def test_inner_product_grid_mismatch():
    f = Trajectory2(Grid(0.0, 1.0, 64), np.zeros(65), np.zeros(65))
    h = Trajectory2(Grid(0.0, 1.0, 128), np.zeros(129), np.zeros(129))
    with pytest.raises(GridMismatchError):
        inner_product(f, h)


def test_inner_product_positivity():
    g = Grid(0.0, 1.0, 128)
    f = Trajectory2(g, np.exp(g.nodes), np.cos(g.nodes))
    assert inner_product(f, f).real > 0


def test_pauli_algebra():
    assert pauli_algebra_selftest()


def test_trapezoid_second_order():
    exact = 1.0 / 3.0
    errs = []
    for m in (500, 1000):
        g = Grid(0.0, 1.0, m)
        errs.append(abs(float(g.trapezoid_weights() @ g.nodes**2) - exact))
    assert errs[1] < 1e-6
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_boundary_angle_reduction():
    ang, k = BoundaryAngles.reduce(2.0)
    assert -math.pi / 2 < ang <= math.pi / 2
    assert ang == pytest.approx(2.0 + math.pi * k)
