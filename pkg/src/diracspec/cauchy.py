"""Direct solvers for the Dirac Cauchy problems.

The system B y' + Omega y = lambda y is propagated in first-order form
y' = A(x, lambda) y with

    A = ((q, -lambda - p), (lambda - p, -q)) = C(x) + lambda * D,

C = B*Omega, D = -B.  A is trace free, so every transition matrix has unit
determinant and the Wronskian of two solutions at one lambda is constant.

Two fixed-step integrators are provided.  The default is a fourth-order
exponential (Magnus) scheme built on two-point Gauss-Legendre sampling: the
step matrix is the exact exponential of

    h*(A1 + A2)/2 + (sqrt(3) h^2 / 12) [A2, A1],

evaluated in closed form for trace-free 2x2 matrices.  It is exact for
constant coefficients (in particular for the zero potential at every
lambda), which a plain Runge-Kutta step is not; that exactness is what lets
eigenvalues of simple references be resolved to 1e-10 and beyond.  A
classical RK4 stepper is kept as an option for convergence-order tests.

Both coefficient matrices of a step are affine in lambda, so the
lambda-free parts are precomputed once per (potential, grid) and the
propagation is vectorized over a whole batch of lambda values.  That batch
axis is the intended parallelization/performance axis of the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DiracError,
    DomainError,
    Grid,
    GridMismatchError,
    PotentialMatrix,
    Trajectory2,
)

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class SolverConfig:
    """Integrator selection: method 'magnus4' (default) or 'rk4'; m grid intervals."""

    method: str = "magnus4"
    m: int | None = None

    def __post_init__(self):
        if self.method not in ("magnus4", "rk4"):
            raise DiracError(f"unknown method {self.method!r}")
        if self.m is not None and self.m < 64:
            raise DiracError("need at least 64 intervals")


@dataclass(frozen=True)
class FundamentalMatrix:
    """Phi(x, lambda) per node; Phi(a) = identity, det Phi = 1 throughout."""

    grid: Grid
    entries: np.ndarray  # shape (m+1, 2, 2)

    def det(self) -> np.ndarray:
        e = self.entries
        return e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]


def _c_matrix(pot: PotentialMatrix, x: np.ndarray) -> np.ndarray:
    """C(x) = B*Omega(x) = ((q, -p), (-p, -q)), stacked over x."""
    p = pot.sample_p(x)
    q = pot.sample_q(x)
    out = np.empty(x.shape + (2, 2))
    out[..., 0, 0] = q
    out[..., 0, 1] = -p
    out[..., 1, 0] = -p
    out[..., 1, 1] = -q
    return out


# D = -B; [X, D] for 2x2 X computed explicitly where needed
_D = np.array([[0.0, -1.0], [1.0, 0.0]])


def _magnus_coeffs(pot: PotentialMatrix, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Per-step matrices (P, Q) with step exponent M = P + lambda*Q."""
    h = grid.h
    x0 = grid.nodes[:-1]
    g1 = x0 + h * (0.5 - _SQRT3 / 6.0)
    g2 = x0 + h * (0.5 + _SQRT3 / 6.0)
    c1 = _c_matrix(pot, g1)
    c2 = _c_matrix(pot, g2)
    comm_cc = c2 @ c1 - c1 @ c2
    dc = c2 - c1
    comm_cd = dc @ _D - _D @ dc
    w = _SQRT3 * h * h / 12.0
    P = 0.5 * h * (c1 + c2) + w * comm_cc
    Q = np.broadcast_to(h * _D, P.shape) + w * comm_cd
    return P, np.ascontiguousarray(Q)


def _rk4_coeffs(pot: PotentialMatrix, grid: Grid):
    x = grid.nodes
    mid = x[:-1] + 0.5 * grid.h
    return _c_matrix(pot, x[:-1]), _c_matrix(pot, mid), _c_matrix(pot, x[1:])


# small bounded cache of per-(potential, grid, method) step coefficients
_COEFF_CACHE: dict = {}


def _step_coeffs(pot: PotentialMatrix, grid: Grid, method: str):
    key = (id(pot), grid.a, grid.b, grid.m, method)
    hit = _COEFF_CACHE.get(key)
    if hit is not None and hit[0] is pot:
        return hit[1]
    if method == "magnus4":
        data = _magnus_coeffs(pot, grid)
    else:
        data = _rk4_coeffs(pot, grid)
    if len(_COEFF_CACHE) > 48:
        _COEFF_CACHE.pop(next(iter(_COEFF_CACHE)))
    _COEFF_CACHE[key] = (pot, data)
    return data


def _expm_tracefree(a, b, c):
    """Entries of exp(((a, b), (c, -a))) via cosh/sinhc of s, s^2 = a^2 + bc."""
    z = a * a + b * c
    if np.iscomplexobj(z):
        s = np.sqrt(z.astype(complex))
        small = np.abs(z) < 1e-12
        s_safe = np.where(small, 1.0, s)
        ch = np.cosh(s)
        sh = np.where(small, 1.0 + z / 6.0 + z * z / 120.0, np.sinh(s_safe) / s_safe)
    else:
        r = np.sqrt(np.abs(z))
        pos = z >= 0.0
        small = np.abs(z) < 1e-12
        r_safe = np.where(small, 1.0, r)
        ch = np.where(pos, np.cosh(r), np.cos(r))
        sh = np.where(
            small,
            1.0 + z / 6.0 + z * z / 120.0,
            np.where(pos, np.sinh(r_safe), np.sin(r_safe)) / r_safe,
        )
    return ch + sh * a, sh * b, sh * c, ch - sh * a


def _apply_step(y1, y2, e00, e01, e10, e11):
    return e00 * y1 + e01 * y2, e10 * y1 + e11 * y2


def propagate(
    pot: PotentialMatrix,
    grid: Grid,
    lam,
    y0,
    method: str = "magnus4",
    direction: int = +1,
    store: bool = False,
    renorm: bool = False,
):
    """Propagate y' = A(x, lambda) y across the grid for a batch of lambdas.

    lam has shape (K,); y0 has shape (2,) or (2, K).  direction=+1 runs from
    grid.a to grid.b, -1 the other way (starting from y(b) = y0).  With
    store=True the full node history of shape (2, K, m+1) is returned, otherwise
    the endpoint of shape (2, K).  renorm rescales the state by a positive
    factor whenever it grows past 1e100 (only ratios survive; used for
    stiff half-axis sweeps).
    """
    lam = np.atleast_1d(np.asarray(lam))
    K = lam.shape[0]
    cplx = np.iscomplexobj(lam) or np.iscomplexobj(np.asarray(y0))
    dtype = complex if cplx else float
    y0 = np.asarray(y0, dtype=dtype)
    if y0.ndim == 1:
        y0 = np.repeat(y0[:, None], K, axis=1)
    y1 = y0[0].astype(dtype).copy()
    y2 = y0[1].astype(dtype).copy()
    m = grid.m
    if store:
        Y = np.empty((2, K, m + 1), dtype=dtype)
    sign = 1.0 if direction > 0 else -1.0
    steps = range(m) if direction > 0 else range(m - 1, -1, -1)
    node0 = 0 if direction > 0 else m

    if method == "magnus4" and not store and not renorm:
        # endpoint only: build every step exponential at once, then collapse
        # the ordered product by pairwise reduction (log2(m) matmul rounds)
        P, Q = _step_coeffs(pot, grid, "magnus4")
        a = sign * (P[:, None, 0, 0] + lam[None, :] * Q[:, None, 0, 0])
        b = sign * (P[:, None, 0, 1] + lam[None, :] * Q[:, None, 0, 1])
        c = sign * (P[:, None, 1, 0] + lam[None, :] * Q[:, None, 1, 0])
        e00, e01, e10, e11 = _expm_tracefree(a, b, c)
        M = np.empty((m, K, 2, 2), dtype=e00.dtype)
        M[..., 0, 0] = e00
        M[..., 0, 1] = e01
        M[..., 1, 0] = e10
        M[..., 1, 1] = e11
        if direction < 0:
            M = M[::-1]
        while M.shape[0] > 1:
            half = M.shape[0] // 2
            tail = M[2 * half :]
            M = M[1 : 2 * half : 2] @ M[0 : 2 * half : 2]
            if tail.shape[0]:
                M = np.concatenate([M[:-1], tail @ M[-1:]])
        T = M[0]
        y1n = T[:, 0, 0] * y1 + T[:, 0, 1] * y2
        y2n = T[:, 1, 0] * y1 + T[:, 1, 1] * y2
        return np.stack([y1n, y2n])

    if method == "magnus4":
        P, Q = _step_coeffs(pot, grid, "magnus4")
        if store:
            Y[0, :, node0] = y1
            Y[1, :, node0] = y2
        for i in steps:
            a = sign * (P[i, 0, 0] + lam * Q[i, 0, 0])
            b = sign * (P[i, 0, 1] + lam * Q[i, 0, 1])
            c = sign * (P[i, 1, 0] + lam * Q[i, 1, 0])
            y1, y2 = _apply_step(y1, y2, *_expm_tracefree(a, b, c))
            if renorm:
                big = np.maximum(np.abs(y1), np.abs(y2))
                mask = big > 1e100
                if np.any(mask):
                    scale = np.where(mask, big, 1.0)
                    y1 = y1 / scale
                    y2 = y2 / scale
            if store:
                j = i + 1 if direction > 0 else i
                Y[0, :, j] = y1
                Y[1, :, j] = y2
    elif method == "rk4":
        C0, Cm, C1 = _step_coeffs(pot, grid, "rk4")
        h = sign * grid.h
        if store:
            Y[0, :, node0] = y1
            Y[1, :, node0] = y2

        def rhs(Cmat, lam, u1, u2):
            d1 = Cmat[0, 0] * u1 + (Cmat[0, 1] - lam) * u2
            d2 = (Cmat[1, 0] + lam) * u1 + Cmat[1, 1] * u2
            return d1, d2

        for i in steps:
            Ca, Cb = (C0[i], C1[i]) if direction > 0 else (C1[i], C0[i])
            k1 = rhs(Ca, lam, y1, y2)
            k2 = rhs(Cm[i], lam, y1 + 0.5 * h * k1[0], y2 + 0.5 * h * k1[1])
            k3 = rhs(Cm[i], lam, y1 + 0.5 * h * k2[0], y2 + 0.5 * h * k2[1])
            k4 = rhs(Cb, lam, y1 + h * k3[0], y2 + h * k3[1])
            y1 = y1 + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y2 = y2 + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            if store:
                j = i + 1 if direction > 0 else i
                Y[0, :, j] = y1
                Y[1, :, j] = y2
    else:
        raise DiracError(f"unknown method {method!r}")

    if store:
        return Y
    return np.stack([y1, y2])


def _grid_for(pot: PotentialMatrix, cfg: SolverConfig | None) -> tuple[Grid, str]:
    cfg = cfg or SolverConfig()
    g = pot.domain
    if cfg.m is not None and cfg.m != g.m:
        g = Grid(g.a, g.b, cfg.m)
    return g, cfg.method


def initial_state(alpha: float) -> np.ndarray:
    """Cauchy data phi(0) = (sin alpha, -cos alpha)."""
    return np.array([np.sin(alpha), -np.cos(alpha)])


def solve_cauchy(
    pot: PotentialMatrix, lam, alpha: float, cfg: SolverConfig | None = None
) -> Trajectory2:
    """phi(x, lambda, alpha): solution with phi(a) = (sin alpha, -cos alpha)."""
    grid, method = _grid_for(pot, cfg)
    Y = propagate(pot, grid, lam, initial_state(alpha), method=method, store=True)
    return Trajectory2(grid, Y[0, 0], Y[1, 0])


def solve_terminal(
    pot: PotentialMatrix, lam, beta: float, cfg: SolverConfig | None = None
) -> Trajectory2:
    """psi(x, lambda, beta): solution with psi(b) = (sin beta, -cos beta)."""
    grid, method = _grid_for(pot, cfg)
    Y = propagate(
        pot, grid, lam, initial_state(beta), method=method, direction=-1, store=True
    )
    return Trajectory2(grid, Y[0, 0], Y[1, 0])


def fundamental_matrix(
    pot: PotentialMatrix, lam, cfg: SolverConfig | None = None
) -> FundamentalMatrix:
    """Phi(x, lambda) with Phi(a) = E; columns are Cauchy solutions for e1, e2."""
    grid, method = _grid_for(pot, cfg)
    lam2 = np.array([lam, lam])
    Y = propagate(
        pot, grid, lam2, np.array([[1.0, 0.0], [0.0, 1.0]]), method=method, store=True
    )
    ent = np.empty((grid.m + 1, 2, 2), dtype=Y.dtype)
    ent[:, 0, 0] = Y[0, 0]
    ent[:, 1, 0] = Y[1, 0]
    ent[:, 0, 1] = Y[0, 1]
    ent[:, 1, 1] = Y[1, 1]
    return FundamentalMatrix(grid, ent)


def wronskian(phi: Trajectory2, u: Trajectory2):
    """omega(x) = phi1*u2 - phi2*u1 per node, plus max deviation from its mean."""
    if phi.grid != u.grid:
        raise GridMismatchError("wronskian needs a shared grid")
    w = phi.y1 * u.y2 - phi.y2 * u.y1
    dev = float(np.max(np.abs(w - np.mean(w))))
    return w, dev


def boundary_values(
    pot: PotentialMatrix,
    lams: np.ndarray,
    alpha: float,
    grid: Grid | None = None,
    method: str = "magnus4",
) -> np.ndarray:
    """Endpoint states phi(b, lambda, alpha) for a batch of lambdas, shape (2, K)."""
    g = grid or pot.domain
    if not np.all(np.isfinite(pot.sample_p(g.nodes))) or not np.all(
        np.isfinite(pot.sample_q(g.nodes))
    ):
        raise DomainError("non-finite potential sample")
    return propagate(pot, g, lams, initial_state(alpha), method=method)
