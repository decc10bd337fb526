"""Closed-form thresholds and level bounds of the model.

All constants are expressed through the best Sobolev embedding constant S
(numerically derived and cached in bubbles.sobolev_constant), the sup norm
q_max = |Q|_inf of the critical weight, and the L^{6/(6-q)} norm f_norm of
the concave weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .bubbles import sobolev_constant
from .variational import ProblemParams


def _check_q(q: float) -> None:
    if not 1.0 < q < 2.0:
        raise ValueError(f"q must lie in (1, 2), got {q}")


def c0_constant(q: float, q_max: float) -> float:
    """C0 = 2/(6-q) * [3 S^3 (2-q) / (q_max (6-q))]^((2-q)/4).

    Equals max_{t>0} [t^(2-q)/2 - q_max/(6 S^3) t^(6-q)], the positive part of
    the sphere lower envelope before the concave term is subtracted.
    """
    _check_q(q)
    if q_max <= 0:
        raise ValueError(f"q_max must be positive, got {q_max}")
    S = sobolev_constant()
    base = 3.0 * S**3 * (2.0 - q) / (q_max * (6.0 - q))
    return 2.0 / (6.0 - q) * base ** ((2.0 - q) / 4.0)


def lambda0(q: float, q_max: float, f_norm: float) -> float:
    """Concave-coupling threshold below which the pass geometry holds."""
    if f_norm <= 0:
        raise ValueError(f"f_norm must be positive, got {f_norm}")
    return q * c0_constant(q, q_max) / f_norm


def gmax_closed(c1t: float, c2t: float, c3t: float) -> float:
    """max_{t>=0} c1t t^2 + c2t t^4 - c3t t^6, in closed form."""
    if c3t <= 0:
        raise ValueError(f"c3t must be positive, got {c3t}")
    if c1t < 0 or c2t < 0 or (c1t == 0 and c2t == 0):
        raise ValueError("c1t, c2t must be nonnegative and not both zero")
    disc = c2t * c2t + 3.0 * c1t * c3t
    return (9.0 * c1t * c2t * c3t + 2.0 * c2t**3 + 2.0 * disc**1.5) / (27.0 * c3t * c3t)


def critical_level(a: float, b: float, q_max: float) -> float:
    """The compactness threshold Lambda (without the concave-term shift):

    Lambda = a b S^3 / (4 q_max) + b^3 S^6 / (24 q_max^2)
             + (b^2 S^4 + 4 a q_max S)^(3/2) / (24 q_max^2).
    """
    if a <= 0 or b < 0 or q_max <= 0:
        raise ValueError("need a > 0, b >= 0, q_max > 0")
    S = sobolev_constant()
    return (a * b * S**3 / (4.0 * q_max)
            + b**3 * S**6 / (24.0 * q_max**2)
            + (b * b * S**4 + 4.0 * a * q_max * S) ** 1.5 / (24.0 * q_max**2))


def c1_constant(q: float, f_norm: float) -> float:
    """C1 = (2-q)/(4q) * [(4-q) f_norm / (2 S^(q/2))]^(2/(2-q)).

    C1 * lambda^(2/(2-q)) = max_{x>=0} [beta x^q - x^2/4] with
    beta = (4-q) lambda f_norm / (4 q S^(q/2)).
    """
    _check_q(q)
    S = sobolev_constant()
    return ((2.0 - q) / (4.0 * q)
            * ((4.0 - q) * f_norm / (2.0 * S ** (q / 2.0))) ** (2.0 / (2.0 - q)))


def c3_constant(q: float, f_norm: float, a: float) -> float:
    """C3 = (2-q)/2 * (3q/(2a))^(q/(2-q)) * ((6-q) f_norm / (6 q S^(q/2)))^(2/(2-q))."""
    _check_q(q)
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    S = sobolev_constant()
    return ((2.0 - q) / 2.0 * (3.0 * q / (2.0 * a)) ** (q / (2.0 - q))
            * ((6.0 - q) * f_norm / (6.0 * q * S ** (q / 2.0))) ** (2.0 / (2.0 - q)))


def lambda_tilde0(q: float, f_norm: float, b: float) -> float:
    """The b-scaled threshold C2 * b^((6-q)/2) with

    C2 = q S^(q/2) / (2 (6-q) f_norm) * (3 (4-q) S^3 / (2 (6-q)))^((4-q)/2).

    The displayed C2 carries no critical-weight factor; it is exact for
    |Q|_inf = 1 and a lower bound otherwise.
    """
    _check_q(q)
    if f_norm <= 0 or b < 0:
        raise ValueError("need f_norm > 0 and b >= 0")
    return _c2_scaling(q, f_norm) * b ** ((6.0 - q) / 2.0)


def _c2_scaling(q: float, f_norm: float) -> float:
    S = sobolev_constant()
    return (q * S ** (q / 2.0) / (2.0 * (6.0 - q) * f_norm)
            * (3.0 * (4.0 - q) * S**3 / (2.0 * (6.0 - q))) ** ((4.0 - q) / 2.0))


def h_roots(a: float, b: float, q_max: float) -> tuple[float, float]:
    """Roots t1 < 0 < t2 of h(t) = q_max^(2/3) t^2 - b S^2 t - a S q_max^(1/3)."""
    if a <= 0 or b < 0 or q_max <= 0:
        raise ValueError("need a > 0, b >= 0, q_max > 0")
    S = sobolev_constant()
    disc = math.sqrt(b * b * S**4 + 4.0 * a * q_max * S)
    t1 = (b * S * S - disc) / (2.0 * q_max ** (2.0 / 3.0))
    t2 = (b * S * S + disc) / (2.0 * q_max ** (2.0 / 3.0))
    return t1, t2


def b0_of_lambda(lam: float, q: float, q_max: float, f_norm: float) -> float:
    """Smallest nonlocal coupling for which lam sits below the scaled
    threshold: 0 when lam < lambda0, else the exact inverse of lambda_tilde0."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam < lambda0(q, q_max, f_norm):
        return 0.0
    return (lam / _c2_scaling(q, f_norm)) ** (2.0 / (6.0 - q))


def mountain_pass_geometry(q: float, q_max: float, f_norm: float,
                           lam: float) -> tuple[float, float]:
    """(eta, beta): value and location of the maximum of the sphere envelope

        l(x) = x^2/2 - q_max/(6 S^3) x^6 - lam f_norm / q * x^q,

    so that the energy is at least eta on the sphere ||u|| = beta whenever
    eta > 0 (which holds for lam < lambda0).
    """
    _check_q(q)
    S = sobolev_constant()
    c6 = q_max / (6.0 * S**3)
    cq = lam * f_norm / q

    def neg_envelope(x: float) -> float:
        return -(0.5 * x * x - c6 * x**6 - cq * x**q)

    xmax = (3.0 * S**3 / q_max) ** 0.25  # stationary point of the lam = 0 envelope
    res = minimize_scalar(neg_envelope, bounds=(1e-12, 2.0 * xmax), method="bounded",
                          options={"xatol": 1e-13})
    beta = float(res.x)
    return -float(res.fun), beta


@dataclass
class ThresholdReport:
    """Every closed-form constant of the model for one instance."""

    S: float
    lambda0: float
    C0: float
    C1: float
    C2_scaling: float
    lambda_tilde0: float
    C3: float
    Lambda: float
    t1: float
    t2: float
    b0_of_lambda: float
    eta_beta: tuple[float, float]
    level_bound: float


def threshold_report(p: ProblemParams) -> ThresholdReport:
    q_max, f_norm = p.Q.q_max, p.f.q_max
    t1, t2 = h_roots(p.a, p.b, q_max)
    Lam = critical_level(p.a, p.b, q_max)
    C1 = c1_constant(p.q, f_norm)
    return ThresholdReport(
        S=sobolev_constant(),
        lambda0=lambda0(p.q, q_max, f_norm),
        C0=c0_constant(p.q, q_max),
        C1=C1,
        C2_scaling=_c2_scaling(p.q, f_norm),
        lambda_tilde0=lambda_tilde0(p.q, f_norm, p.b),
        C3=c3_constant(p.q, f_norm, p.a),
        Lambda=Lam,
        t1=t1,
        t2=t2,
        b0_of_lambda=b0_of_lambda(p.lam, p.q, q_max, f_norm),
        eta_beta=mountain_pass_geometry(p.q, q_max, f_norm, p.lam),
        level_bound=Lam - C1 * p.lam ** (2.0 / (2.0 - p.q)),
    )


def level_bound(p: ProblemParams) -> float:
    """Lambda - C1 lambda^(2/(2-q)), the strict upper bound for admissible
    min-max levels."""
    return (critical_level(p.a, p.b, p.Q.q_max)
            - c1_constant(p.q, p.f.q_max) * p.lam ** (2.0 / (2.0 - p.q)))
