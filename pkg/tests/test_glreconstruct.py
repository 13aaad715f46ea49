import math

import numpy as np
import pytest

from diracspec.core import BoundaryAngles, ContractError, Grid
from diracspec.eigen import SpectralData, SpectralDatum
from diracspec.glreconstruct import (
    GLSeriesKernel,
    build_F,
    recover_potential,
    reconstruct,
    solve_gl,
)
from diracspec.isospectral import omega_l1_distance, zero_family


def _lattice_data(alpha, beta, N, a=math.pi):
    delta = (beta - alpha) / math.pi
    items = {n: SpectralDatum(n, n + delta, a=a) for n in range(-N, N + 1)}
    return SpectralData(BoundaryAngles.make(alpha, beta), items)


def _rank_one_data(N, m, t):
    # shift a_m of the zero-potential data: a_m = pi e^{-t}
    items = {
        n: SpectralDatum(n, float(n), a=math.pi * (math.exp(-t) if n == m else 1.0))
        for n in range(-N, N + 1)
    }
    return SpectralData(BoundaryAngles.make(0.0, 0.0), items)


def test_F_vanishes_for_reference_data():
    series = GLSeriesKernel.make(_lattice_data(0.3, 0.1, 12), 12)
    for x, t in ((0.0, 0.0), (1.0, 0.5), (math.pi, 2.0)):
        assert np.max(np.abs(build_F(series, x, t))) < 1e-13


def test_F_rank_one_closed_form():
    m, t0 = 0, 0.8
    series = GLSeriesKernel.make(_rank_one_data(10, m, t0), 10)
    # only the n = m term survives: (e^{t0} - 1)/pi * phi0 phi0^T at lam = 0
    c = math.expm1(t0) / math.pi
    for x, t in ((0.2, 0.1), (2.0, 1.5)):
        u = np.array([math.sin(0.0), -math.cos(0.0)])
        expect = c * np.outer(u, u)
        assert np.max(np.abs(build_F(series, x, t) - expect)) < 1e-13


def test_F_transpose_symmetry():
    data = _lattice_data(0.2, 0.0, 8)
    for n in data.items:
        data.items[n] = SpectralDatum(
            n, data.items[n].lam + 0.05 / (1 + n * n), a=math.pi * (1 + 0.1 / (1 + n * n))
        )
    series = GLSeriesKernel(data, GLSeriesKernel.make(_lattice_data(0.2, 0.0, 8), 8).reference, 8)
    x, t = 1.3, 0.4
    A = build_F(series, x, t)
    B = build_F(series, t, x)
    assert np.max(np.abs(A - B.T)) < 1e-12


def test_solve_gl_zero_kernel():
    grid = Grid(0.0, math.pi, 256)
    series = GLSeriesKernel.make(_lattice_data(0.0, 0.0, 10), 10)
    kernel = solve_gl(series, grid)
    assert np.max(np.abs(kernel.K)) < 1e-12
    pot = recover_potential(kernel)
    assert np.max(np.abs(pot.p)) < 1e-12
    assert np.max(np.abs(pot.q)) < 1e-12


def test_solve_gl_residual_small():
    grid = Grid(0.0, math.pi, 256)
    series = GLSeriesKernel.make(_rank_one_data(10, 1, 0.5), 10)
    kernel = solve_gl(series, grid)
    assert kernel.residual < 1e-9


def test_truncation_grid_guard():
    grid = Grid(0.0, math.pi, 64)
    series = GLSeriesKernel.make(_lattice_data(0.0, 0.0, 20), 20)
    with pytest.raises(ContractError):
        solve_gl(series, grid)


def test_rank_one_recovers_family_member():
    m, t0 = 1, 0.5
    grid = Grid(0.0, math.pi, 512)
    series = GLSeriesKernel.make(_rank_one_data(40, m, t0), 40)
    pot = recover_potential(solve_gl(series, grid))
    assert omega_l1_distance(pot, zero_family(m, t0, grid)) < 5e-3


def test_reconstruct_lattice_is_zero():
    grid = Grid(0.0, math.pi, 512)
    pot, _ = reconstruct(_lattice_data(0.0, 0.0, 40), grid, 40)
    assert np.max(np.abs(pot.p)) < 1e-6
    assert np.max(np.abs(pot.q)) < 1e-6


def test_reconstruct_round_trip_sin(sin_gl_data):
    grid = Grid(0.0, math.pi, 512)
    pot, phis = reconstruct(sin_gl_data, grid, 60)
    xs = grid.nodes
    inner = (xs > 0.1 * math.pi) & (xs < 0.9 * math.pi)
    err = np.abs(pot.q[inner] - np.sin(xs[inner]))
    assert np.quantile(err, 0.9) < 5e-2
    assert np.quantile(np.abs(pot.p[inner]), 0.9) < 5e-2


def test_reconstruct_rejects_missing_norming():
    data = _lattice_data(0.0, 0.0, 10)
    data.items[3] = SpectralDatum(3, 3.0, a=None)
    grid = Grid(0.0, math.pi, 256)
    with pytest.raises(ContractError):
        reconstruct(data, grid, 10)


def test_transformed_solutions_match_zero_pot():
    grid = Grid(0.0, math.pi, 256)
    series = GLSeriesKernel.make(_lattice_data(0.0, 0.0, 10), 10)
    kernel = solve_gl(series, grid)
    from diracspec.glreconstruct import transformed_solutions

    phis = transformed_solutions(series, kernel)
    assert np.max(np.abs(phis[2].y1 - np.sin(2 * grid.nodes))) < 1e-10
    assert np.max(np.abs(phis[2].y2 + np.cos(2 * grid.nodes))) < 1e-10
