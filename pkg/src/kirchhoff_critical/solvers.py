"""The three existence mechanisms, realized numerically.

local_min        constrained descent inside the ball ||u|| <= beta, the
                 algorithmic stand-in for an almost-minimizer selection
mountain_pass    path deformation: descend the maximizing knot of a discrete
                 path from 0 to a negative-energy endpoint, re-parametrize by
                 H^1 arc length, repeat until the maximizer is critical
ground_state     least energy among all converged critical points
continuation_b   warm-started ground states along a decreasing b sequence,
                 ending with the residual of the b = 0 limit problem

All descents are H^1-Riesz gradient flows with Armijo backtracking, so the
step metric matches the norm in which residuals are measured.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from .grids import RadialFunction, h1_norm, sample
from .bubbles import cutoff_bubble
from .variational import (
    NoInteriorMax,
    ProblemParams,
    energy,
    fiber_coefficients,
    fiber_maximize,
    gradient,
    nehari_residual,
)
from .thresholds import level_bound, mountain_pass_geometry

log = logging.getLogger(__name__)

ARMIJO_SLOPE = 1e-4


class SolverError(RuntimeError):
    pass


class NoNegativeStart(SolverError):
    """No scaling of the seed bump has negative energy (lambda too small
    relative to the discretization, or zero)."""


class Stagnation(SolverError):
    """Residual failed to reach tolerance within the iteration budget."""


class LevelBreach(SolverError):
    """A converged min-max level reached the closed-form compactness bound;
    flags a discretization or parameter regime problem."""


class EmptyCandidateSet(SolverError):
    """No solver run produced a critical point within tolerance."""


class Classification(enum.Enum):
    LOCAL_MIN = "LocalMin"
    MOUNTAIN_PASS = "MountainPass"
    GROUND_STATE = "GroundState"


@dataclass
class Solution:
    """A computed critical point with its certificates."""

    u: RadialFunction
    energy: float
    residual: float
    classification: Classification
    nehari: float
    positive: bool
    level_margin: float
    tol: float
    iterations: int


@dataclass
class PathState:
    """A discrete path: knots from 0 to an endpoint with negative energy."""

    knots: list
    max_index: int
    max_energy: float


@dataclass
class ContinuationRecord:
    b_values: list
    solutions: list
    successive_h1_gaps: list
    limit_residual_b0: float
    bound_M: float


def positivize(u: RadialFunction) -> RadialFunction:
    """Nodal absolute value; energy-neutral on sign-definite inputs."""
    return RadialFunction(np.abs(u.values), u.grid)


# -- descent ------------------------------------------------------------------


@dataclass
class _DescentResult:
    u: RadialFunction
    energy: float
    residual: float
    iterations: int
    converged: bool
    escaped: bool = False


def _project_ball(u: RadialFunction, a: float, radius: float | None) -> RadialFunction:
    if radius is None:
        return u
    nrm = h1_norm(u, a)
    if nrm > radius:
        return u * (radius / nrm)
    return u


def _descend(p: ProblemParams, u0: RadialFunction, tol: float, max_iter: int,
             ball_radius: float | None = None,
             energy_floor: float | None = None) -> _DescentResult:
    """Armijo-backtracked Riesz gradient flow, optionally projected onto the
    ball ||u|| <= ball_radius by radial rescaling."""
    u = _project_ball(u0, p.a, ball_radius)
    val = energy(p, u)
    step = 1.0
    for it in range(max_iter):
        g = gradient(p, u)
        res = h1_norm(g, p.a)
        if res <= tol:
            return _DescentResult(u, val, res, it, True)
        if energy_floor is not None and val < energy_floor:
            return _DescentResult(u, val, res, it, False, escaped=True)
        step = min(step * 2.0, 1.0e3)
        accepted = False
        for _ in range(70):
            trial = u - step * g
            projected = ball_radius is not None and h1_norm(trial, p.a) > ball_radius
            if projected:
                trial = _project_ball(trial, p.a, ball_radius)
            tval = energy(p, trial)
            good = (tval < val) if projected else (tval <= val - ARMIJO_SLOPE * step * res * res)
            if good:
                u, val, accepted = trial, tval, True
                break
            step *= 0.5
        if not accepted:
            # line search exhausted at machine scale; report where we stand
            return _DescentResult(u, val, res, it, res <= tol)
    g = gradient(p, u)
    res = h1_norm(g, p.a)
    return _DescentResult(u, val, res, max_iter, res <= tol)


def _positive_bump(p: ProblemParams, width: float | None = None) -> RadialFunction:
    """A fixed positive seed profile, vanishing at r = R, unit H^1 norm."""
    R = p.grid.truncation_radius
    if p.whole_space:
        w = width if width is not None else 1.0
        u = sample(p.grid, lambda r: np.exp(-((r / w) ** 2)) * (1.0 - (r / R) ** 2))
    else:
        w = width if width is not None else R
        u = sample(p.grid, lambda r: np.exp(-((r / w) ** 2)) * (1.0 - (r / R) ** 2))
    vals = u.values.copy()
    vals[-1] = 0.0
    u = RadialFunction(vals, p.grid)
    return u * (1.0 / h1_norm(u, p.a))


def _certify(p: ProblemParams, u: RadialFunction, tol: float, cls: Classification,
             iterations: int) -> Solution:
    val = energy(p, u)
    res = h1_norm(gradient(p, u), p.a)
    return Solution(
        u=u,
        energy=val,
        residual=res,
        classification=cls,
        nehari=nehari_residual(p, u),
        positive=bool(u.values.min() >= -1e-10),
        level_margin=level_bound(p) - val,
        tol=tol,
        iterations=iterations,
    )


def _finalize(p: ProblemParams, result: _DescentResult, tol: float,
              cls: Classification) -> Solution:
    u = positivize(result.u)
    sol = _certify(p, u, tol, cls, result.iterations)
    if sol.residual > tol:
        # positivization crossed a sign change; polish briefly
        polished = _descend(p, u, tol, 2000)
        sol = _certify(p, positivize(polished.u), tol, cls,
                       result.iterations + polished.iterations)
        if sol.residual > tol:
            raise Stagnation(
                f"residual {sol.residual:.3e} above tolerance {tol:.1e} after polishing")
    return sol


# -- local minimizer ----------------------------------------------------------


def local_min(p: ProblemParams, beta: float | None = None, tol: float = 1e-6,
              max_iter: int = 50_000) -> Solution:
    """Critical point with I(u) < 0 inside the open ball ||u|| < beta.

    Starts from t0 * psi with psi a fixed positive bump and t0 halved until
    the energy is negative, then descends with projection onto the ball.
    """
    if beta is None:
        beta = mountain_pass_geometry(p.q, p.Q.q_max, p.f.q_max, p.lam)[1]
    psi = _positive_bump(p)
    t0 = min(1.0, 0.95 * beta)
    while t0 > 1e-18 and energy(p, t0 * psi) >= 0.0:
        t0 *= 0.5
    if t0 <= 1e-18:
        raise NoNegativeStart(
            "no scaling of the seed bump has negative energy; the concave term "
            "is absent or too weak on this grid")
    result = _descend(p, t0 * psi, tol, max_iter, ball_radius=beta)
    if not result.converged:
        raise Stagnation(
            f"local_min residual {result.residual:.3e} above {tol:.1e} "
            f"after {result.iterations} iterations")
    sol = _finalize(p, result, tol, Classification.LOCAL_MIN)
    if sol.energy >= 0.0:
        raise Stagnation("descent terminated at a nonnegative energy level")
    return sol


# -- mountain pass ------------------------------------------------------------


def _line_max(energy_fn, left, mid, right, evals: int = 24):
    """Maximize the energy along the two-segment polyline left-mid-right.

    Golden-section search on each segment; returns the better point and its
    value (at least the knot value itself)."""
    best_u, best_v = mid, energy_fn(mid)
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    for a_pt, b_pt in ((left, mid), (mid, right)):
        lo, hi = 0.0, 1.0
        x1 = hi - gr * (hi - lo)
        x2 = lo + gr * (hi - lo)
        seg = lambda s: a_pt + s * (b_pt - a_pt)
        f1, f2 = energy_fn(seg(x1)), energy_fn(seg(x2))
        for _ in range(evals // 2):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gr * (hi - lo)
                f2 = energy_fn(seg(x2))
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gr * (hi - lo)
                f1 = energy_fn(seg(x1))
        s_best = 0.5 * (lo + hi)
        cand = seg(s_best)
        cval = energy_fn(cand)
        if cval > best_v:
            best_u, best_v = cand, cval
    return best_u, best_v


def _deform_path(energy_fn, gradient_fn, norm_fn, inner_fn, knots: list,
                 tol: float, max_sweeps: int):
    """Generic descent-deformation on a knot path with fixed endpoints.

    Each sweep locates the maximizing knot, sharpens it by a line
    maximization along the adjacent polyline segments, takes an Armijo
    descent step transversal to the path (the tangent component is projected
    out, so the step does not slide the knot off the pass), and
    re-parametrizes by arc length.  Re-parametrization only re-samples the
    polyline, which keeps knots dense across the ridge so the discrete path
    cannot tunnel between samples.  Returns (PathState, residual, sweeps,
    history of the running path maximum).
    """
    vals = [energy_fn(u) for u in knots]
    history = []
    for sweep in range(max_sweeps):
        j = int(np.argmax(vals))
        if j in (0, len(knots) - 1):
            knots, vals = _reparametrize(knots, vals, energy_fn, norm_fn)
            j = int(np.argmax(vals))
            if j in (0, len(knots) - 1):
                break
        # sharpen the along-path maximum before measuring criticality
        knots[j], vals[j] = _line_max(energy_fn, knots[j - 1], knots[j], knots[j + 1])
        history.append(max(vals))
        g = gradient_fn(knots[j])
        res = norm_fn(g)
        if res <= tol:
            return PathState(knots, j, vals[j]), res, sweep, history
        tau = knots[j + 1] - knots[j - 1]
        tau_sq = inner_fn(tau, tau)
        d = g - (inner_fn(g, tau) / tau_sq) * tau if tau_sq > 0 else g
        slope = inner_fn(g, d)
        if slope > 0:
            spacing = 0.5 * norm_fn(tau)
            dn = norm_fn(d)
            step = spacing / dn if dn > 0 else 1.0
            while step > 1e-18:
                trial = knots[j] - step * d
                tval = energy_fn(trial)
                if tval <= vals[j] - ARMIJO_SLOPE * step * slope:
                    knots[j], vals[j] = trial, tval
                    break
                step *= 0.5
        knots, vals = _reparametrize(knots, vals, energy_fn, norm_fn)
    j = int(np.argmax(vals))
    res = norm_fn(gradient_fn(knots[j]))
    history.append(vals[j])
    return PathState(knots, j, vals[j]), res, max_sweeps, history


def _reparametrize(knots, vals, energy_fn, norm_fn):
    seg = np.array([norm_fn(knots[j + 1] - knots[j]) for j in range(len(knots) - 1)])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0:
        return knots, vals
    targets = np.linspace(0.0, total, len(knots))
    out = [knots[0]]
    k = 0
    for tgt in targets[1:-1]:
        while cum[k + 1] < tgt and k < len(seg) - 1:
            k += 1
        theta = (tgt - cum[k]) / seg[k] if seg[k] > 0 else 0.0
        out.append(knots[k] + theta * (knots[k + 1] - knots[k]))
    out.append(knots[-1])
    return out, [energy_fn(u) for u in out]


def mountain_pass(p: ProblemParams, tol: float = 1e-4, knots: int = 41,
                  max_sweeps: int = 500, enforce_level_bound: bool = True,
                  bubble_eps: float | None = None) -> Solution:
    """Min-max critical point via path deformation.

    The initial path is the ray t -> t*e along a scaled cutoff bubble with
    I(e) < 0.  Raises LevelBreach when the converged level violates the
    closed-form compactness bound and enforcement is on.
    """
    grid = p.grid
    R = grid.truncation_radius
    eps = bubble_eps if bubble_eps is not None else R / 5.0
    w = cutoff_bubble(eps, R, grid)
    w = w * (1.0 / h1_norm(w, p.a))
    t_top = fiber_maximize(fiber_coefficients(p, w))  # NoInteriorMax propagates
    T = 2.0 * t_top
    for _ in range(200):
        if energy(p, T * w) < 0.0:
            break
        T *= 1.5
    e = T * w

    path = [float(s) * e for s in np.linspace(0.0, 1.0, knots)]
    state, res, sweeps, history = _deform_path(
        lambda u: energy(p, u),
        lambda u: gradient(p, u),
        lambda u: h1_norm(u, p.a),
        path, tol, max_sweeps)
    if res > tol:
        raise Stagnation(
            f"mountain_pass residual {res:.3e} above {tol:.1e} after {sweeps} sweeps "
            f"(level {state.max_energy:.6g})")
    result = _DescentResult(state.knots[state.max_index], state.max_energy, res,
                            sweeps, True)
    sol = _finalize(p, result, tol, Classification.MOUNTAIN_PASS)
    if enforce_level_bound and sol.level_margin <= 0.0:
        raise LevelBreach(
            f"mountain-pass level {sol.energy:.6g} reached the compactness bound "
            f"(margin {sol.level_margin:.6g}); the concentration window is not "
            f"resolvable at these parameters")
    return sol


# -- ground state -------------------------------------------------------------


def _coercive_floor(p: ProblemParams) -> float:
    """min_x [x^2/4 - (4-q)/(4q) lam f_norm S^(-q/2) x^q]; every critical
    point's energy sits above this."""
    from .bubbles import sobolev_constant
    from scipy.optimize import minimize_scalar

    c = (4.0 - p.q) / (4.0 * p.q) * p.lam * p.f.q_max * sobolev_constant() ** (-p.q / 2.0)
    res = minimize_scalar(lambda x: 0.25 * x * x - c * x**p.q,
                          bounds=(0.0, 10.0 * (2.0 * c) ** (1.0 / (2.0 - p.q)) + 1.0),
                          method="bounded")
    return float(res.fun)


def ground_state(p: ProblemParams, tol: float = 1e-6, mp_tol: float = 1e-4,
                 seed: int = 0, n_starts: int = 6,
                 warm_start: RadialFunction | None = None,
                 include_mountain_pass: bool = True) -> Solution:
    """Least-energy critical point among local_min, mountain_pass, and
    multi-start descents; ties within 1e-9 break toward smaller residual.

    The mountain-pass candidate is collected without level-bound enforcement:
    a point above the bound is still a critical point, only its admissibility
    certificate fails, and it never wins the energy comparison against the
    negative-energy minimizer anyway.
    """
    floor = _coercive_floor(p) - 1.0
    candidates: list[Solution] = []

    try:
        candidates.append(local_min(p, tol=tol))
    except SolverError as err:
        log.info("ground_state: local_min did not converge (%s)", err)

    mp_energy = None
    if include_mountain_pass:
        try:
            mp = mountain_pass(p, tol=mp_tol, enforce_level_bound=False)
            mp_energy = mp.energy
            candidates.append(mp)
        except (SolverError, NoInteriorMax) as err:
            log.info("ground_state: mountain_pass did not converge (%s)", err)

    if warm_start is not None:
        res = _descend(p, warm_start, tol, 50_000, energy_floor=floor)
        if res.converged:
            candidates.append(_finalize(p, res, tol, Classification.LOCAL_MIN))

    rng = np.random.default_rng(seed)
    R = p.grid.truncation_radius
    for _ in range(n_starts):
        width = R * rng.uniform(0.2, 0.8)
        amp = rng.uniform(0.25, 1.5)
        seed_u = _positive_bump(p, width=width) * amp
        res = _descend(p, seed_u, tol, 20_000, energy_floor=floor)
        if res.converged and res.energy > floor:
            candidates.append(_finalize(p, res, tol, Classification.LOCAL_MIN))

    converged = [s for s in candidates if s.residual <= max(tol, mp_tol)]
    if not converged:
        raise EmptyCandidateSet("no solver run converged to a critical point")
    best = min(converged, key=lambda s: (s.energy, s.residual))
    near = [s for s in converged if s.energy <= best.energy + 1e-9]
    best = min(near, key=lambda s: s.residual)
    if mp_energy is not None and best.energy > mp_energy + tol:
        raise SolverError("ground-state energy exceeds the min-max level")
    return replace(best, classification=Classification.GROUND_STATE)


# -- b -> 0 continuation ------------------------------------------------------


def continuation_b(p: ProblemParams, b_seq, tol: float = 1e-6,
                   seed: int = 0) -> ContinuationRecord:
    """Ground states along decreasing b, warm-started, with the residual of
    the b = 0 limit problem evaluated at the final iterate."""
    b_seq = [float(b) for b in b_seq]
    if any(b <= 0 for b in b_seq):
        raise ValueError("b sequence must be strictly positive; b = 0 is only "
                         "evaluated as the limit residual")
    if any(b2 >= b1 for b1, b2 in zip(b_seq, b_seq[1:])):
        raise ValueError("b sequence must be strictly decreasing")
    if b_seq[-1] > 1e-3:
        raise ValueError("b sequence must end at or below 1e-3")

    from .thresholds import critical_level

    solutions: list[Solution] = []
    gaps: list[float] = []
    prev: Solution | None = None
    iteration_log = []
    for k, b in enumerate(b_seq):
        pk = replace(p, b=b)
        if prev is None:
            sol = ground_state(pk, tol=tol, seed=seed)
        else:
            sol = ground_state(pk, tol=tol, seed=seed + k, n_starts=1,
                               warm_start=prev.u,
                               include_mountain_pass=prev.energy > 0.0)
        if prev is not None:
            gaps.append(h1_norm(sol.u - prev.u, p.a))
        iteration_log.append(sol.iterations)
        solutions.append(sol)
        prev = sol
    log.info("continuation iterations per b step: %s", iteration_log)

    p0 = replace(p, b=0.0)
    limit_res = h1_norm(gradient(p0, prev.u), p.a)
    return ContinuationRecord(
        b_values=b_seq,
        solutions=solutions,
        successive_h1_gaps=gaps,
        limit_residual_b0=float(limit_res),
        bound_M=critical_level(p.a, 1.0, p.Q.q_max),
    )
