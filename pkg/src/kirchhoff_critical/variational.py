"""Problem instances and their variational structure.

The energy functional of the model is

    I(u) = 1/2 ||u||^2 + b/4 (int |grad u|^2)^2
           - 1/6 int Q |u|^6 - lambda/q int f |u|^q,

with ||u||^2 = a int |grad u|^2 (+ int u^2 on whole space), 1 < q < 2.  This
module evaluates I, its Riesz gradient, the Nehari pairing <I'(u), u>, the
gradient-frozen companion functional with coefficient (a + b*A2)/2, and the
scalar fiber maps t -> I(t u) together with their closed-form stationarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .grids import (
    DomainKind,
    GridMismatch,
    RadialFunction,
    RadialGrid,
    dirichlet_inner_values,
    h1_norm,
    integrate,
    riesz_solve,
    stiffness_apply,
)


class NoInteriorMax(RuntimeError):
    """The fiber map decreases for all t > 0: no positive interior maximum."""


# -- weights ------------------------------------------------------------------


@dataclass
class WeightProfile:
    """A radial weight together with the norms and metadata the model uses.

    For the critical weight Q, q_max is the sup norm |Q|_inf, peak_location
    the radius of its maximizer, and (holder_alpha, holder_c, holder_rho)
    declare the local Holder control |Q(r) - Q(r0)| <= C |r - r0|^alpha for
    |r - r0| < rho.  For the concave weight f, q_max stores the
    L^{6/(6-q)} norm and the peak metadata is absent.
    """

    values: np.ndarray
    q_max: float
    peak_location: float | None = None
    holder_alpha: float | None = None
    holder_c: float | None = None
    holder_rho: float | None = None


def critical_weight(values: np.ndarray, grid: RadialGrid, q: float,
                    alpha: float, holder_c: float | None = None,
                    rho: float | None = None) -> WeightProfile:
    """Validate and wrap a critical-term weight Q."""
    values = np.asarray(values, dtype=float)
    if np.any(values < 0):
        raise ValueError("critical weight Q must be nonnegative")
    if alpha <= q / 2:
        raise ValueError(f"holder_alpha must exceed q/2 = {q / 2}, got {alpha}")
    q_max = float(values.max())
    if q_max <= 0:
        raise ValueError("critical weight Q must be positive somewhere")
    peak = float(grid.nodes[int(values.argmax())])
    if rho is None:
        rho = grid.truncation_radius
    d = np.abs(grid.nodes - peak)
    near = (d < rho) & (d > 0)
    if holder_c is None:
        holder_c = float(np.max(np.abs(values[near] - q_max) / d[near] ** alpha,
                                initial=0.0)) * (1.0 + 1e-9) + 1e-30
    else:
        bad = np.abs(values[near] - q_max) > holder_c * d[near] ** alpha * (1 + 1e-12)
        if np.any(bad):
            raise ValueError("declared Holder bound fails near the peak of Q")
    return WeightProfile(values, q_max, peak, float(alpha), float(holder_c), float(rho))


def subcritical_weight(values: np.ndarray, grid: RadialGrid, q: float) -> WeightProfile:
    """Validate and wrap the concave-term weight f; q_max holds |f|_{6/(6-q)}."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("concave weight f must be strictly positive at every node")
    p = 6.0 / (6.0 - q)
    norm = integrate(grid, values**p) ** (1.0 / p)
    if not math.isfinite(norm):
        raise ValueError("L^{6/(6-q)} norm of f is not finite")
    return WeightProfile(values, float(norm))


def constant_profile(grid: RadialGrid, q: float, value: float, role: str) -> WeightProfile:
    if role == "Q":
        return critical_weight(np.full(grid.node_count, value), grid, q, alpha=2.0)
    if role == "f":
        return subcritical_weight(np.full(grid.node_count, value), grid, q)
    raise ValueError(f"unknown weight role {role!r}")


def gaussian_bump_profile(grid: RadialGrid, q: float, center: float, width: float,
                          floor: float, role: str) -> WeightProfile:
    """floor + (1 - floor) * exp(-((r - center)/width)^2), peak value 1."""
    if width <= 0:
        raise ValueError("gaussian-bump width must be positive")
    if not 0 <= floor < 1:
        raise ValueError("gaussian-bump floor must lie in [0, 1)")
    vals = floor + (1.0 - floor) * np.exp(-(((grid.nodes - center) / width) ** 2))
    if role == "Q":
        return critical_weight(vals, grid, q, alpha=2.0, rho=width)
    if role == "f":
        if floor <= 0:
            raise ValueError("gaussian-bump f needs floor > 0 to stay positive")
        return subcritical_weight(vals, grid, q)
    raise ValueError(f"unknown weight role {role!r}")


# -- problem parameters -------------------------------------------------------


@dataclass
class ProblemParams:
    """One full problem instance.

    b = 0 is allowed only so the limit problem's residual can be evaluated;
    solvers require b > 0.
    """

    a: float
    b: float
    lam: float
    q: float
    Q: WeightProfile
    f: WeightProfile
    grid: RadialGrid

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.b < 0:
            raise ValueError(f"b must be nonnegative, got {self.b}")
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not 1.0 < self.q < 2.0:
            raise ValueError(f"q must lie in (1, 2), got {self.q}")
        for w in (self.Q, self.f):
            if w.values.shape != (self.grid.node_count,):
                raise ValueError("weight profile does not match the grid")

    @property
    def whole_space(self) -> bool:
        return self.grid.domain_kind is DomainKind.WHOLE_SPACE_TRUNCATED


def _check_member(p: ProblemParams, u: RadialFunction) -> None:
    if u.grid.key() != p.grid.key():
        raise GridMismatch("function does not live on the instance grid")
    if p.grid.domain_kind is DomainKind.DIRICHLET_BALL and u.values[-1] != 0.0:
        raise ValueError("Dirichlet-ball functions must vanish at r = R")


def _concave_density(p: ProblemParams, uv: np.ndarray) -> np.ndarray:
    return p.f.values * np.abs(uv) ** p.q


# -- energy, gradient, Nehari -------------------------------------------------


def energy(p: ProblemParams, u: RadialFunction) -> float:
    """I(u)."""
    _check_member(p, u)
    uv = u.values
    d = dirichlet_inner_values(p.grid, uv, uv)
    val = 0.5 * p.a * d + 0.25 * p.b * d * d
    if p.whole_space:
        val += 0.5 * integrate(p.grid, uv * uv)
    val -= integrate(p.grid, p.Q.values * uv**6) / 6.0
    if p.lam:
        val -= (p.lam / p.q) * integrate(p.grid, _concave_density(p, uv))
    return float(val)


def _gradient_load(p: ProblemParams, u: RadialFunction) -> np.ndarray:
    """Nodal loads <I'(u), e_j> against the nodal basis."""
    uv = u.values
    w = p.grid.quad_weights
    ku = stiffness_apply(p.grid, uv)
    d = dirichlet_inner_values(p.grid, uv, uv)
    load = (p.a + p.b * d) * ku - w * p.Q.values * uv**5
    if p.lam:
        # |u|^(q-2) u extended by continuity as 0 at zeros (valid since q > 1)
        load -= p.lam * w * p.f.values * np.sign(uv) * np.abs(uv) ** (p.q - 1.0)
    if p.whole_space:
        load += w * uv
    else:
        load[-1] = 0.0
    return load


def gradient(p: ProblemParams, u: RadialFunction) -> RadialFunction:
    """The H^1-Riesz representative g of I'(u): <g, v> = <I'(u), v> for all v."""
    _check_member(p, u)
    return RadialFunction(riesz_solve(p.grid, p.a, _gradient_load(p, u)), p.grid)


def residual_norm(p: ProblemParams, u: RadialFunction) -> float:
    return h1_norm(gradient(p, u), p.a)


def nehari_residual(p: ProblemParams, u: RadialFunction) -> float:
    """<I'(u), u> = ||u||^2 + b (int |grad u|^2)^2 - int Q|u|^6 - lambda int f|u|^q."""
    _check_member(p, u)
    uv = u.values
    d = dirichlet_inner_values(p.grid, uv, uv)
    val = p.a * d + p.b * d * d
    if p.whole_space:
        val += integrate(p.grid, uv * uv)
    val -= integrate(p.grid, p.Q.values * uv**6)
    if p.lam:
        val -= p.lam * integrate(p.grid, _concave_density(p, uv))
    return float(val)


# -- frozen functional --------------------------------------------------------


def frozen_energy(p: ProblemParams, A2: float, u: RadialFunction) -> float:
    """J(u) with the nonlocal coefficient frozen at (a + b*A2)/2."""
    if A2 < 0:
        raise ValueError(f"A2 must be nonnegative, got {A2}")
    _check_member(p, u)
    uv = u.values
    d = dirichlet_inner_values(p.grid, uv, uv)
    val = 0.5 * (p.a + p.b * A2) * d
    if p.whole_space:
        val += 0.5 * integrate(p.grid, uv * uv)
    val -= integrate(p.grid, p.Q.values * uv**6) / 6.0
    if p.lam:
        val -= (p.lam / p.q) * integrate(p.grid, _concave_density(p, uv))
    return float(val)


def frozen_gradient(p: ProblemParams, A2: float, u: RadialFunction) -> RadialFunction:
    """Riesz representative of J'(u) in the same H^1 inner product as gradient().

    Satisfies <J'(u), v> = <I'(u), v> + b (A2 - int |grad u|^2) int grad u . grad v.
    """
    if A2 < 0:
        raise ValueError(f"A2 must be nonnegative, got {A2}")
    _check_member(p, u)
    d = dirichlet_inner_values(p.grid, u.values, u.values)
    load = _gradient_load(p, u) + p.b * (A2 - d) * stiffness_apply(p.grid, u.values)
    if not p.whole_space:
        load[-1] = 0.0
    return RadialFunction(riesz_solve(p.grid, p.a, load), p.grid)


# -- fiber maps ---------------------------------------------------------------


@dataclass
class FiberCoefficients:
    """Coefficients of t -> I(t u) = c1t t^2 + c2t t^4 - c3t t^6 - fterm t^q."""

    c1t: float
    c2t: float
    c3t: float
    fterm: float
    q: float


def fiber_coefficients(p: ProblemParams, u: RadialFunction) -> FiberCoefficients:
    _check_member(p, u)
    uv = u.values
    d = dirichlet_inner_values(p.grid, uv, uv)
    c1 = 0.5 * p.a * d
    if p.whole_space:
        c1 += 0.5 * integrate(p.grid, uv * uv)
    c2 = 0.25 * p.b * d * d
    c3 = integrate(p.grid, p.Q.values * uv**6) / 6.0
    fterm = (p.lam / p.q) * integrate(p.grid, _concave_density(p, uv)) if p.lam else 0.0
    return FiberCoefficients(float(c1), float(c2), float(c3), float(fterm), p.q)


def fiber_energy(fc: FiberCoefficients, t: float) -> float:
    if t < 0:
        raise ValueError("fiber parameter t must be nonnegative")
    return float(fc.c1t * t**2 + fc.c2t * t**4 - fc.c3t * t**6 - fc.fterm * t**fc.q)


def _fiber_derivative(fc: FiberCoefficients, t: np.ndarray | float):
    return (2.0 * fc.c1t * t + 4.0 * fc.c2t * t**3 - 6.0 * fc.c3t * t**5
            - fc.q * fc.fterm * t ** (fc.q - 1.0))


def fiber_maximize(fc: FiberCoefficients, tol: float = 1e-12) -> float:
    """Largest positive stationary point of the fiber with negative curvature.

    Bracket by doubling until the fiber is decreasing and negative, scan for
    the last sign change of the derivative, then bisect to abs tol.  Raises
    NoInteriorMax when the fiber decreases for all t > 0 (the concave term
    dominates, i.e. lambda is too large for this profile).
    """
    if fc.c3t <= 0:
        raise ValueError("fiber needs a positive sixth-order coefficient")
    upper = 1.0
    for _ in range(200):
        if fiber_energy(fc, upper) < 0 and _fiber_derivative(fc, upper) < 0:
            break
        upper *= 2.0
    ts = np.geomspace(1e-8, upper, 8192)
    ds = _fiber_derivative(fc, ts)
    down = np.nonzero((ds[:-1] > 0) & (ds[1:] <= 0))[0]
    if down.size == 0:
        raise NoInteriorMax(
            "fiber map has no positive interior maximum (concave term dominates)")
    lo, hi = ts[down[-1]], ts[down[-1] + 1]
    t_star = brentq(lambda t: _fiber_derivative(fc, t), lo, hi, xtol=tol)
    curvature = (2.0 * fc.c1t + 12.0 * fc.c2t * t_star**2 - 30.0 * fc.c3t * t_star**4
                 - fc.q * (fc.q - 1.0) * fc.fterm * t_star ** (fc.q - 2.0))
    if curvature >= 0:
        raise NoInteriorMax("stationary point is not a local maximum")
    return float(t_star)
