"""Describing-function / harmonic-balance analysis of sinusoidally forced crawling.

The switching friction responds to a biased sinusoidal speed v_bar + v_tilde*cos;
its DC term and fundamental harmonic admit closed forms in the bias ratio
a = v_bar / v_tilde. Balancing harmonics across the strain and center-of-mass
dynamics pins a to a function of the anisotropy alone, fixes the nodal speed
phases to 0 and pi, and reduces the forcing phase and strain amplitude to a
single quadratic. The resulting average speed peaks at the undamped natural
frequency (omega = 1 in dimensionless time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FrictionDominatesError, InvalidParameterError, OutOfRegimeError
from .model import DimensionlessGroups

__all__ = [
    "FourierFrictionCoeffs",
    "HbSolution",
    "friction_fourier_coeffs",
    "speed_bias_ratio",
    "hb_solve",
    "optimal_speed",
    "hb_speed_curve",
]


@dataclass(frozen=True)
class FourierFrictionCoeffs:
    """DC, cos and sin coefficients of the switching friction under biased-sinusoid input."""

    c0: float
    c1: float
    c2: float


@dataclass(frozen=True)
class HbSolution:
    """Harmonic-balance unknowns at one forcing frequency.

    strain(t) = A*sin(omega*t), forcing = sin(omega*t + phi), nodal speeds
    v_bar + v_tilde*cos(omega*t + theta_i); a = v_bar / v_tilde.
    """

    omega: float
    A: float
    phi: float
    a: float
    v_bar: float
    v_tilde: float
    theta1: float
    theta2: float


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")


def friction_fourier_coeffs(a: float, theta: float, delta: float) -> FourierFrictionCoeffs:
    """Fourier coefficients of the switching friction driven by a + cos(omega*t + theta).

    Valid for bias ratios 0 < a <= 1; larger bias never reverses the local speed,
    so the friction never switches and the crawling analysis does not apply.
    """
    _check_delta(delta)
    if not 0.0 < a <= 1.0:
        raise OutOfRegimeError(f"bias ratio must lie in (0, 1], got {a}")
    root = math.sqrt(max(0.0, 1.0 - a * a))
    lead = 2.0 * (1.0 + delta) / math.pi
    return FourierFrictionCoeffs(
        c0=(-delta * math.pi + (1.0 + delta) * math.acos(a)) / math.pi,
        c1=-lead * math.cos(theta) * root,
        c2=lead * math.sin(theta) * root,
    )


def speed_bias_ratio(delta: float) -> float:
    """Bias ratio a = cos(delta*pi/(1+delta)) forced by the zero-mean-friction balance.

    Independent of the forcing frequency and of every dimensionless group except
    the anisotropy: over a periodic cycle the friction must average to zero.
    """
    _check_delta(delta)
    return math.cos(delta * math.pi / (1.0 + delta))


def _friction_drag(pi_sigma: float, delta: float, a: float) -> float:
    """Fundamental-harmonic friction opposition entering the phase balance."""
    return 2.0 * pi_sigma * (1.0 + delta) * math.sqrt(max(0.0, 1.0 - a * a)) / math.pi


def hb_solve(g: DimensionlessGroups, delta: float, omega: float) -> HbSolution:
    """Solve the harmonic-balance system at one forcing frequency.

    The phases are theta1 = 0, theta2 = pi (anti-phase nodal speeds), the bias
    ratio comes from :func:`speed_bias_ratio`, and the strain amplitude A > 0
    solves (zeta*omega*A + c)^2 + (A*(1-omega^2)/2)^2 = pi_f^2 with c the
    friction drag. No positive root means friction drowns the actuation and no
    crawling limit cycle is predicted.
    """
    _check_delta(delta)
    if omega <= 0.0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    a = speed_bias_ratio(delta)
    c = _friction_drag(g.pi_sigma, delta, a)

    detune = 0.5 * (1.0 - omega * omega)
    q2 = (g.zeta * omega) ** 2 + detune * detune
    q1 = 2.0 * g.zeta * omega * c
    q0 = c * c - g.pi_f * g.pi_f
    if q2 <= 0.0:
        raise InvalidParameterError("undamped resonance: amplitude is unbounded at omega = 1")
    disc = q1 * q1 - 4.0 * q2 * q0
    if disc < 0.0:
        raise FrictionDominatesError(
            f"no real strain amplitude at omega = {omega:.6g}: friction drag {c:.6g} "
            f"exceeds actuation {g.pi_f:.6g}"
        )
    A = (-q1 + math.sqrt(disc)) / (2.0 * q2)
    if A <= 0.0:
        raise FrictionDominatesError(
            f"no crawling limit cycle at omega = {omega:.6g}: friction drag {c:.6g} "
            f">= actuation {g.pi_f:.6g}"
        )

    sin_phi = (g.zeta * omega * A + c) / g.pi_f
    cos_phi = A * detune / g.pi_f
    v_tilde = 0.5 * omega * A
    return HbSolution(
        omega=omega,
        A=A,
        phi=math.atan2(sin_phi, cos_phi),
        a=a,
        v_bar=a * v_tilde,
        v_tilde=v_tilde,
        theta1=0.0,
        theta2=math.pi,
    )


def optimal_speed(g: DimensionlessGroups, delta: float) -> float:
    """Peak average CoM speed under unit sinusoidal forcing, attained at omega = 1.

    May be non-positive, meaning the predicted friction drag swamps the
    actuation; callers decide how to treat that regime.
    """
    _check_delta(delta)
    if g.zeta <= 0.0:
        raise InvalidParameterError("optimal speed needs positive damping")
    half_angle = delta * math.pi / (1.0 + delta)
    return (
        math.cos(half_angle)
        * (g.pi_f - 2.0 * g.pi_sigma * (1.0 + delta) / math.pi * math.sin(half_angle))
        / (2.0 * g.zeta)
    )


def hb_speed_curve(g: DimensionlessGroups, delta: float, omega_grid) -> list[tuple[float, float]]:
    """Predicted average CoM speed across frequencies; NaN marks no-crawl entries."""
    _check_delta(delta)
    if g.zeta <= 0.0:
        raise InvalidParameterError("speed curve needs positive damping")
    a = speed_bias_ratio(delta)
    drag = _friction_drag(g.pi_sigma, delta, a)
    out: list[tuple[float, float]] = []
    for w in (float(x) for x in omega_grid):
        if w <= 0.0:
            raise InvalidParameterError(f"omega grid must be positive, got {w}")
        try:
            sol = hb_solve(g, delta, w)
        except FrictionDominatesError:
            out.append((w, math.nan))
            continue
        v = 0.5 * a / g.zeta * (g.pi_f * math.sin(sol.phi) - drag)
        out.append((w, v))
    return out
