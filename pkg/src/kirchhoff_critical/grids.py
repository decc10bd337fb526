"""Radial discretization of balls in R^3 and the discrete H^1 structure.

Functions u = u(|x|) on the ball B_R(0) (or on a large ball standing in for
R^3) are stored by their nodal values on the uniform radii r_i = i*dr,
i = 1..n.  Integrals are taken against the spherical measure 4*pi*r^2 dr with
composite-trapezoid weights; the Dirichlet energy int |grad u|^2 dx uses
midpoint-cell differences, with the origin handled through the symmetry
condition u'(0) = 0 (ghost value u(0) = (4*u_1 - u_2)/3, exact for even
quadratics).  Both rules are second order in dr.

The H^1 inner product is

    <u, v> = a * int grad u . grad v dx          (Dirichlet ball)
    <u, v> = a * int grad u . grad v + u v dx    (truncated whole space)

and Riesz representatives against it are obtained from a cached banded
Cholesky factorization, so gradient flows cost O(n) per step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded


class DomainKind(enum.Enum):
    DIRICHLET_BALL = "ball"
    WHOLE_SPACE_TRUNCATED = "whole-space"


class GridMismatch(ValueError):
    """Pairing or arithmetic between functions living on different grids."""


@dataclass
class RadialGrid:
    """Uniform radial grid on (0, R] with 3D-measure quadrature weights.

    The origin is not a node: the measure 4*pi*r^2 dr vanishes there, and
    differentiation uses the symmetry ghost instead.  Instances are treated
    as immutable after construction (arrays are write-protected).
    """

    truncation_radius: float
    node_count: int
    nodes: np.ndarray
    quad_weights: np.ndarray
    domain_kind: DomainKind
    _ops: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dr(self) -> float:
        return self.truncation_radius / self.node_count

    def key(self) -> tuple:
        return (self.truncation_radius, self.node_count, self.domain_kind)


def build_grid(truncation_radius: float, node_count: int,
               kind: DomainKind | str = DomainKind.DIRICHLET_BALL) -> RadialGrid:
    """Build the uniform grid with trapezoid weights against 4*pi*r^2 dr."""
    if isinstance(kind, str):
        kind = DomainKind(kind)
    if truncation_radius <= 0:
        raise ValueError(f"truncation radius must be positive, got {truncation_radius}")
    if node_count < 16:
        raise ValueError(f"node_count must be at least 16, got {node_count}")
    dr = truncation_radius / node_count
    nodes = dr * np.arange(1, node_count + 1, dtype=float)
    weights = 4.0 * np.pi * nodes**2 * dr
    weights[-1] *= 0.5  # trapezoid endpoint; the r=0 endpoint has zero measure
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return RadialGrid(float(truncation_radius), int(node_count), nodes, weights, kind)


@dataclass
class RadialFunction:
    """Nodal values of a radially symmetric function on a RadialGrid."""

    values: np.ndarray
    grid: RadialGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.node_count,):
            raise GridMismatch(
                f"expected {self.grid.node_count} nodal values, got shape {self.values.shape}")

    def _binary(self, other: "RadialFunction", op) -> "RadialFunction":
        same_grid(self, other)
        return RadialFunction(op(self.values, other.values), self.grid)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return RadialFunction(-self.values, self.grid)

    def __mul__(self, scalar: float):
        return RadialFunction(self.values * float(scalar), self.grid)

    __rmul__ = __mul__

    def copy(self) -> "RadialFunction":
        return RadialFunction(self.values.copy(), self.grid)


def same_grid(u: RadialFunction, v: RadialFunction) -> RadialGrid:
    if u.grid is not v.grid and u.grid.key() != v.grid.key():
        raise GridMismatch("functions live on different grids")
    return u.grid


def sample(grid: RadialGrid, fn) -> RadialFunction:
    """Sample a callable r -> value on the grid nodes."""
    return RadialFunction(np.asarray(fn(grid.nodes), dtype=float), grid)


def zeros(grid: RadialGrid) -> RadialFunction:
    return RadialFunction(np.zeros(grid.node_count), grid)


# -- quadrature ---------------------------------------------------------------


def integrate(grid: RadialGrid, nodal: np.ndarray) -> float:
    """int f dx for nodal samples of f, against 4*pi*r^2 dr."""
    return float(np.dot(grid.quad_weights, nodal))


def lp_norm(u: RadialFunction, p: float) -> float:
    """(int |u|^p dx)^(1/p), p >= 1."""
    if p < 1:
        raise ValueError(f"p must be at least 1, got {p}")
    return float(integrate(u.grid, np.abs(u.values) ** p) ** (1.0 / p))


# -- discrete Dirichlet form --------------------------------------------------


def _edge_weights(grid: RadialGrid) -> np.ndarray:
    """Per-edge coefficients of the quadratic form int |grad u|^2 dx.

    Cell i spans (r_i, r_{i+1}) with r_0 = 0; the form is
    sum_i 4*pi*m_i^2/dr * (u_{i+1} - u_i)^2 with m_i the cell midpoint.
    The origin cell uses the ghost u(0) = (4u_1 - u_2)/3, which turns its
    difference into (u_2 - u_1)/3 and therefore folds into the first edge.
    """
    gamma = grid._ops.get("edges")
    if gamma is None:
        dr = grid.dr
        mids = dr * (np.arange(grid.node_count) + 0.5)
        c = 4.0 * np.pi * mids**2 / dr
        gamma = c[1:].copy()
        gamma[0] += c[0] / 9.0
        gamma.setflags(write=False)
        grid._ops["edges"] = gamma
    return gamma


def dirichlet_inner_values(grid: RadialGrid, uv: np.ndarray, vv: np.ndarray) -> float:
    gamma = _edge_weights(grid)
    return float(np.dot(gamma * np.diff(uv), np.diff(vv)))


def dirichlet_energy(u: RadialFunction) -> float:
    """int |grad u|^2 dx by centered midpoint-cell differences."""
    return dirichlet_inner_values(u.grid, u.values, u.values)


def stiffness_apply(grid: RadialGrid, uv: np.ndarray) -> np.ndarray:
    """Matrix-vector product K u with the Dirichlet-form stiffness matrix.

    (K u)_j is the load such that v . (K u) = int grad u . grad v dx.
    """
    flux = _edge_weights(grid) * np.diff(uv)
    out = np.zeros_like(uv)
    out[:-1] -= flux
    out[1:] += flux
    return out


def h1_inner(u: RadialFunction, v: RadialFunction, a: float,
             kind: DomainKind | None = None) -> float:
    """The model inner product; the mass term enters only on whole space."""
    grid = same_grid(u, v)
    if kind is None:
        kind = grid.domain_kind
    val = a * dirichlet_inner_values(grid, u.values, v.values)
    if kind is DomainKind.WHOLE_SPACE_TRUNCATED:
        val += float(np.dot(grid.quad_weights * u.values, v.values))
    return val


def h1_norm(u: RadialFunction, a: float, kind: DomainKind | None = None) -> float:
    return float(np.sqrt(max(h1_inner(u, u, a, kind), 0.0)))


# -- Riesz representation -----------------------------------------------------


def _riesz_factor(grid: RadialGrid, a: float):
    key = ("riesz", float(a))
    fac = grid._ops.get(key)
    if fac is None:
        gamma = _edge_weights(grid)
        n = grid.node_count
        if grid.domain_kind is DomainKind.WHOLE_SPACE_TRUNCATED:
            diag = np.zeros(n)
            diag[:-1] += a * gamma
            diag[1:] += a * gamma
            diag += grid.quad_weights
            off = -a * gamma
        else:
            # homogeneous value at r = R; solve on the first n-1 nodes
            diag = a * gamma.copy()
            diag[1:] += a * gamma[:-1]
            off = -a * gamma[:-1]
        ab = np.zeros((2, diag.size))
        ab[0, 1:] = off
        ab[1, :] = diag
        fac = cholesky_banded(ab, lower=False)
        grid._ops[key] = fac
    return fac


def riesz_solve(grid: RadialGrid, a: float, load: np.ndarray) -> np.ndarray:
    """Solve <g, v> = load . v for all discrete v in the H^1 inner product."""
    fac = _riesz_factor(grid, a)
    if grid.domain_kind is DomainKind.WHOLE_SPACE_TRUNCATED:
        return cho_solve_banded((fac, False), load)
    g = cho_solve_banded((fac, False), load[:-1])
    return np.append(g, 0.0)
