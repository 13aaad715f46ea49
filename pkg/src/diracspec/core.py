"""Shared numeric primitives for the canonical one-dimensional Dirac system.

The system under study is B y' + Omega(x) y = lambda y with

    B = ((0, 1), (-1, 0)),   Omega(x) = p(x)*S2 + q(x)*S3,

where S2 = diag(1, -1) and S3 = antidiag(1, 1).  This module holds the
grid/quadrature plumbing, the 2x2 matrix algebra, and the potential
representation used by every other module.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

# the fixed 2x2 matrices of the canonical system
S1 = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
S2 = np.array([[1.0, 0.0], [0.0, -1.0]])
S3 = np.array([[0.0, 1.0], [1.0, 0.0]])
E2 = np.eye(2)
B = np.array([[0.0, 1.0], [-1.0, 0.0]])  # = S1 / i

DEFAULT_M = 2048


class DiracError(Exception):
    """Base class for all library errors."""


class DomainError(DiracError):
    """Argument outside the domain a function is defined on."""


class GridMismatchError(DiracError):
    """Two sampled objects do not share a grid."""


class BracketFailure(DiracError):
    """No sign change found when bracketing an eigenvalue."""

    def __init__(self, n: int, lo: float, hi: float):
        self.n = n
        super().__init__(f"no sign change for index n={n} in [{lo:.6g}, {hi:.6g}]")


class InterlacingError(DiracError):
    """Input spectra violate the required interlacing."""


class PoleError(DiracError):
    """Evaluation too close to a pole."""

    def __init__(self, lam, nearest):
        self.nearest = nearest
        super().__init__(f"lambda={lam} is within tolerance of pole {nearest}")


class SingularSystemError(DiracError):
    """A dense linear system that should be regular came out singular."""


class ContractError(DiracError):
    """A precondition of an operation was violated."""


class InconsistentDataError(DiracError):
    """Spectral data failed its internal consistency verification."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid of m intervals on [a, b]."""

    a: float
    b: float
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ContractError("grid needs at least one interval")
        if not self.b > self.a:
            raise ContractError("grid endpoints must satisfy a < b")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.m + 1)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.m + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w


def default_grid(b: float = np.pi, m: int = DEFAULT_M) -> Grid:
    return Grid(0.0, b, m)


@dataclass(frozen=True)
class GridFunction:
    """Scalar samples on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.m + 1,):
            raise GridMismatchError(
                f"value count {v.shape} does not match node count {self.grid.m + 1}"
            )
        object.__setattr__(self, "values", v)

    def integral(self) -> complex:
        return float(np.real_if_close(self.grid.trapezoid_weights() @ self.values))


ScalarField = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float, None]


def _sample(f: ScalarField, grid: Grid, x: np.ndarray) -> np.ndarray:
    """Evaluate a closed-form or grid-sampled scalar field at points x."""
    x = np.asarray(x, dtype=float)
    if f is None:
        return np.zeros_like(x)
    if callable(f):
        return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
    if np.isscalar(f):
        return np.full_like(x, float(f))
    arr = np.asarray(f, dtype=float)
    # grid samples: linear interpolation between nodes
    return np.interp(x, grid.nodes, arr)


@dataclass(frozen=True)
class PotentialMatrix:
    """The pair (p, q) defining Omega(x) = p*S2 + q*S3 on a domain grid.

    p and q may be callables (sampled lazily, preferred for smooth data),
    plain arrays aligned with the domain nodes, scalars, or None for zero.
    """

    p: ScalarField
    q: ScalarField
    domain: Grid

    def sample_p(self, x: np.ndarray) -> np.ndarray:
        return _sample(self.p, self.domain, x)

    def sample_q(self, x: np.ndarray) -> np.ndarray:
        return _sample(self.q, self.domain, x)

    def check_domain(self, x: float) -> None:
        if x < self.domain.a - 1e-12 or x > self.domain.b + 1e-12:
            raise DomainError(f"x={x} outside [{self.domain.a}, {self.domain.b}]")
        vals = np.concatenate([self.sample_p(np.array([x])), self.sample_q(np.array([x]))])
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"non-finite potential sample at x={x}")

    def omega_at(self, x: np.ndarray) -> np.ndarray:
        """Omega(x) as an array of 2x2 matrices, shape (..., 2, 2)."""
        p = self.sample_p(x)
        q = self.sample_q(x)
        out = np.empty(np.shape(p) + (2, 2))
        out[..., 0, 0] = p
        out[..., 0, 1] = q
        out[..., 1, 0] = q
        out[..., 1, 1] = -p
        return out

    @staticmethod
    def zero(grid: Grid | None = None) -> "PotentialMatrix":
        return PotentialMatrix(None, None, grid or default_grid())

    @staticmethod
    def from_samples(p: np.ndarray, q: np.ndarray, grid: Grid) -> "PotentialMatrix":
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if p.shape != (grid.m + 1,) or q.shape != (grid.m + 1,):
            raise GridMismatchError("sample counts must match grid node count")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise DomainError("potential samples must be finite")
        return PotentialMatrix(p, q, grid)


@dataclass(frozen=True)
class Trajectory2:
    """Two-component solution samples (y1, y2) on a grid."""

    grid: Grid
    y1: np.ndarray
    y2: np.ndarray

    def __post_init__(self):
        y1 = np.asarray(self.y1)
        y2 = np.asarray(self.y2)
        n = self.grid.m + 1
        if y1.shape != (n,) or y2.shape != (n,):
            raise GridMismatchError("component counts must equal node count")
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "y2", y2)

    def norm_sq(self) -> float:
        w = self.grid.trapezoid_weights()
        return float(w @ (np.abs(self.y1) ** 2 + np.abs(self.y2) ** 2))

    def scaled(self, c) -> "Trajectory2":
        return Trajectory2(self.grid, c * self.y1, c * self.y2)


@dataclass(frozen=True)
class BoundaryAngles:
    """Boundary angles reduced modulo pi into (-pi/2, pi/2].

    The reduction counts are retained: the raw angle equals the reduced
    one minus pi times the count, which is what the eigenvalue-function
    index arithmetic consumes.
    """

    alpha: float
    beta: float
    alpha_shift: int = field(default=0)
    beta_shift: int = field(default=0)

    @staticmethod
    def reduce(angle: float) -> tuple[float, int]:
        """Return (reduced, k) with reduced = angle + pi*k in (-pi/2, pi/2]."""
        k = int(np.floor(0.5 - angle / np.pi))
        red = angle + np.pi * k
        if red <= -np.pi / 2:  # guard the half-open edge against rounding
            red += np.pi
            k += 1
        return red, k

    @staticmethod
    def make(alpha: float, beta: float) -> "BoundaryAngles":
        a, ka = BoundaryAngles.reduce(alpha)
        b, kb = BoundaryAngles.reduce(beta)
        return BoundaryAngles(a, b, ka, kb)


def cumulative_c(pot: PotentialMatrix, x: float) -> float:
    """Trapezoid value of the accumulated strength int_0^x (|p| + |q|) ds."""
    pot.check_domain(x)
    g = pot.domain
    nsub = max(2, int(np.ceil((x - g.a) / g.h)))
    xs = np.linspace(g.a, x, nsub + 1)
    f = np.abs(pot.sample_p(xs)) + np.abs(pot.sample_q(xs))
    return float(np.trapezoid(f, xs))


def inner_product(f: Trajectory2, g: Trajectory2) -> complex:
    """Trapezoid approximation of int (f1 conj(g1) + f2 conj(g2)) dx."""
    if f.grid != g.grid:
        raise GridMismatchError("trajectories live on different grids")
    w = f.grid.trapezoid_weights()
    val = w @ (f.y1 * np.conj(g.y1) + f.y2 * np.conj(g.y2))
    return complex(val) if np.iscomplexobj(val) or np.iscomplex(val) else float(val)


def pauli_algebra_selftest() -> bool:
    """Verify the matrix identities the whole construction leans on."""
    mats = [S1, S2, S3]
    ok = all(np.array_equal(s @ s, E2 + 0j) for s in mats)
    for i in range(3):
        for j in range(3):
            if i != j:
                ok = ok and np.array_equal(mats[i] @ mats[j], -mats[j] @ mats[i])
    ok = ok and np.array_equal(B @ B, -E2)
    ok = ok and np.array_equal(S2 @ B, S3 + 0j)
    ok = ok and np.array_equal(S3 @ B, -S2 + 0j)
    ok = ok and np.array_equal(S1 / 1j, B + 0j)
    return bool(ok)


def cumtrapz0(values: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoid with zero at the first node, along the last axis."""
    v = np.asarray(values)
    mids = 0.5 * h * (v[..., 1:] + v[..., :-1])
    out = np.zeros(v.shape)
    out[..., 1:] = np.cumsum(mids, axis=-1)
    return out


# --- CSV interface: header x,p,q, one row per node ---------------------------


def write_potential_csv(pot: PotentialMatrix, path: str) -> None:
    g = pot.domain
    x = g.nodes
    p = pot.sample_p(x)
    q = pot.sample_q(x)
    with open(path, "w", newline="\n") as fh:
        fh.write("x,p,q\n")
        for xi, pi, qi in zip(x, p, q):
            fh.write(f"{xi:.17g},{pi:.17g},{qi:.17g}\n")


def read_potential_csv(path: str) -> PotentialMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "p", "q"]:
            raise DiracError(f"bad CSV header {header!r}, expected ['x', 'p', 'q']")
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    if len(rows) < 2:
        raise DiracError("potential CSV needs at least two rows")
    x = np.array([r[0] for r in rows])
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
        raise DiracError("potential CSV nodes must be uniformly spaced")
    grid = Grid(float(x[0]), float(x[-1]), len(rows) - 1)
    return PotentialMatrix.from_samples(
        np.array([r[1] for r in rows]), np.array([r[2] for r in rows]), grid
    )
