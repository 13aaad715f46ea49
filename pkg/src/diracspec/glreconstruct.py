"""Constructive inverse problem: potential recovery from spectral data.

From target data {lambda_n, a_n} and the unperturbed reference lattice
(lambda_n^0 = n + (beta - alpha)/pi, a_n^0 = pi) one forms the series
kernel

    F(x, t) = sum_{|n| <= N} [ phi0(x, lambda_n) phi0^T(t, lambda_n)/a_n
                             - phi0(x, lambda_n^0) phi0^T(t, lambda_n^0)/pi ],

phi0(x, lambda) = (sin(lambda x + alpha), -cos(lambda x + alpha)) being the
zero-potential Cauchy solutions.  The transformation kernel K solves

    K(x, t) + F(x, t) + int_0^x K(x, s) F(s, t) ds = 0,   0 <= t <= x,

one dense trapezoid-collocation system per x node, and the potential is
read off the diagonal: with K_A the B-anticommuting (symmetric trace-free)
part of K(x, x),

    Omega(x) = K_A(x, x) B - B K_A(x, x),

i.e. p = -(K12 + K21), q = K11 - K22.  The final step substitutes the
reconstructed eigenfunctions back and checks orthogonality and the
boundary condition, which stands in for the completeness facts the theory
guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BoundaryAngles,
    ContractError,
    Grid,
    InconsistentDataError,
    PotentialMatrix,
    SingularSystemError,
    Trajectory2,
)
from .eigen import SpectralData, SpectralDatum


def _phi0(lam: float, alpha: float, x: np.ndarray) -> np.ndarray:
    """Zero-potential Cauchy solution, shape (2, len(x))."""
    ph = lam * x + alpha
    return np.stack([np.sin(ph), -np.cos(ph)])


@dataclass(frozen=True)
class GLSeriesKernel:
    """Truncated series data for F(x, t): target vs reference lattice."""

    target: SpectralData
    reference: SpectralData
    trunc: int

    def __post_init__(self):
        if self.trunc <= 0:
            raise ContractError("truncation must be positive")
        for spec, name in ((self.target, "target"), (self.reference, "reference")):
            ns = spec.ns()
            if not ns or ns[0] > -self.trunc or ns[-1] < self.trunc:
                raise ContractError(f"{name} window does not cover [-N, N]")
        for n in range(-self.trunc, self.trunc + 1):
            if self.target.items[n].a is None or self.target.items[n].a <= 0:
                raise ContractError(f"target a_{n} missing or nonpositive")

    @staticmethod
    def make(target: SpectralData, trunc: int) -> "GLSeriesKernel":
        """Attach the unperturbed reference lattice for the target's angles."""
        ang = target.angles
        delta = (ang.beta - ang.alpha) / np.pi
        items = {
            n: SpectralDatum(n, n + delta, a=np.pi)
            for n in range(-trunc, trunc + 1)
        }
        return GLSeriesKernel(target, SpectralData(ang, items), trunc)

    def ordered_indices(self) -> list[int]:
        # fixed summation order, ascending |n|, to pair each target term
        # with its reference and keep the cancellation deterministic
        return sorted(range(-self.trunc, self.trunc + 1), key=lambda n: (abs(n), -n))


def build_F(series: GLSeriesKernel, x, t) -> np.ndarray:
    """F(x, t) as a 2x2 real matrix; F(x, t) = F(t, x)^T."""
    alpha = series.target.angles.alpha
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((2, 2) + np.broadcast_shapes(xa.shape, ta.shape))
    for n in series.ordered_indices():
        d = series.target.items[n]
        r = series.reference.items[n]
        ux = _phi0(d.lam, alpha, xa)
        ut = _phi0(d.lam, alpha, ta)
        vx = _phi0(r.lam, alpha, xa)
        vt = _phi0(r.lam, alpha, ta)
        out += np.einsum("a...,b...->ab...", ux, ut) / d.a
        out -= np.einsum("a...,b...->ab...", vx, vt) / np.pi
    if np.ndim(x) == 0 and np.ndim(t) == 0:
        return out[..., 0]
    return out


def _F_grid(series: GLSeriesKernel, grid: Grid) -> np.ndarray:
    """F on all node pairs, shape (nx, nx, 2, 2)."""
    alpha = series.target.angles.alpha
    xs = grid.nodes
    nx = xs.size
    F = np.zeros((nx, nx, 2, 2))
    for n in series.ordered_indices():
        d = series.target.items[n]
        r = series.reference.items[n]
        u = _phi0(d.lam, alpha, xs)
        v = _phi0(r.lam, alpha, xs)
        F += np.einsum("ai,bj->ijab", u, u) / d.a
        F -= np.einsum("ai,bj->ijab", v, v) / np.pi
    return F


@dataclass
class GLKernel:
    """Transformation kernel on the triangle t <= x; zero above it."""

    grid: Grid
    K: np.ndarray  # (nx, nx, 2, 2), row x, column t
    residual: float
    condition: float


def solve_gl(series: GLSeriesKernel, grid: Grid) -> GLKernel:
    """Solve the kernel equation by per-x trapezoid collocation.

    For x = x_j the unknown row block K(x_j, t_i), i <= j, satisfies
        K(x_j, .) (I + W F) = -F(x_j, .)
    with W the trapezoid weights on [0, x_j]; each system is dense of
    size 2(j + 1).
    """
    if series.trunc * 8 > grid.m:
        raise ContractError("truncation too large for the grid: need N <= m/8")
    F = _F_grid(series, grid)
    nx = grid.m + 1
    h = grid.h
    K = np.zeros_like(F)
    worst_res = 0.0
    worst_cond = 0.0
    for j in range(nx):
        ni = j + 1
        w = np.full(ni, h)
        w[0] = w[-1] = 0.5 * h
        if ni == 1:
            w[0] = 0.0
        # blocks: rows s, cols t, each 2x2; unknown row vector of length 2ni
        Fst = F[:ni, :ni]  # (s, t, 2, 2)
        M = (w[:, None, None, None] * Fst).transpose(0, 2, 1, 3).reshape(2 * ni, 2 * ni)
        M += np.eye(2 * ni)
        rhs = F[j, :ni].transpose(1, 0, 2).reshape(2, 2 * ni)
        try:
            sol = np.linalg.solve(M.T, -rhs.T).T
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"kernel system singular at x index {j}") from exc
        res = float(np.max(np.abs(sol @ M + rhs)))
        worst_res = max(worst_res, res)
        if j == nx - 1:
            worst_cond = float(np.linalg.cond(M))
        K[j, :ni] = sol.reshape(2, ni, 2).transpose(1, 0, 2)
    return GLKernel(grid, K, worst_res, worst_cond)


def recover_potential(kernel: GLKernel) -> PotentialMatrix:
    """Omega from the kernel diagonal: p = -(K12+K21), q = K11-K22."""
    d = np.einsum("iiab->iab", kernel.K)
    p = -(d[:, 0, 1] + d[:, 1, 0])
    q = d[:, 0, 0] - d[:, 1, 1]
    return PotentialMatrix.from_samples(p, q, kernel.grid)


def transformed_solutions(
    series: GLSeriesKernel, kernel: GLKernel
) -> dict[int, Trajectory2]:
    """phi(x, lambda_n) = phi0 + int_0^x K(x, s) phi0(s, lambda_n) ds."""
    grid = kernel.grid
    xs = grid.nodes
    alpha = series.target.angles.alpha
    h = grid.h
    nx = xs.size
    wts = np.full(nx, h)
    wts[0] = wts[-1] = 0.5 * h
    # triangle weights: for row x_j only s <= j contribute, endpoint halved
    Kw = kernel.K * wts[None, :, None, None]
    for j in range(1, nx - 1):
        Kw[j, j] *= 0.5
    Kw[0, 0] = 0.0
    out = {}
    for n in series.ordered_indices():
        lam = series.target.items[n].lam
        u = _phi0(lam, alpha, xs)
        add = np.einsum("xsab,bs->ax", Kw, u)
        out[n] = Trajectory2(grid, u[0] + add[0], u[1] + add[1])
    return out


def reconstruct(
    data: SpectralData,
    grid: Grid,
    N: int,
    check_tol: float = 5e-2,
) -> tuple[PotentialMatrix, dict[int, Trajectory2]]:
    """Full recovery pipeline with the closing consistency checks.

    Builds the series kernel, solves for K, recovers Omega, rebuilds the
    eigenfunction family, and verifies (phi_n, phi_m) = a_n delta_nm and
    the terminal boundary condition, both within check_tol relative scale.
    """
    delta = (data.angles.beta - data.angles.alpha) / np.pi
    for n in range(-N, N + 1):
        d = data.items.get(n)
        if d is None or d.a is None or d.a <= 0:
            raise ContractError(f"reconstruction needs lambda and a for n = {n}")
        if abs(d.lam - n - delta) > 2.0:
            raise InconsistentDataError(f"lambda_{n} too far from the lattice")
    series = GLSeriesKernel.make(data, N)
    kernel = solve_gl(series, grid)
    pot = recover_potential(kernel)
    phis = transformed_solutions(series, kernel)

    w = grid.trapezoid_weights()
    beta = data.angles.beta
    check = sorted(range(-N, N + 1), key=abs)[: min(2 * N + 1, 21)]
    for n in check:
        fn = phis[n]
        an = data.items[n].a
        bres = fn.y1[-1] * np.cos(beta) + fn.y2[-1] * np.sin(beta)
        if abs(bres) > check_tol * max(1.0, np.max(np.abs(fn.y2))):
            raise InconsistentDataError(f"boundary check fails at n = {n}")
        for m in check:
            fm = phis[m]
            ip = float(w @ (fn.y1 * fm.y1 + fn.y2 * fm.y2))
            want = an if n == m else 0.0
            if abs(ip - want) > check_tol * np.pi:
                raise InconsistentDataError(
                    f"orthogonality check fails at (n, m) = ({n}, {m})"
                )
    return pot, phis
