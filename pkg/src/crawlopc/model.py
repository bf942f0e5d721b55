"""Crawler physics: parameters, nondimensionalization, friction laws, state derivative.

State convention used throughout the package (z-coordinates):

    z1 = x1 - x2   strain between the two segments
    z2 = x1 + x2   twice the center-of-mass displacement
    z3 = x1'       speed of the head segment
    z4 = x2'       speed of the tail segment

All solver-facing quantities are dimensionless; dimensional inputs are converted
once at the boundary by :func:`nondimensionalize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NoZeroCrossingError

__all__ = [
    "DimensionalParams",
    "FrictionParams",
    "DimensionlessGroups",
    "CharacteristicScales",
    "friction_offset",
    "nondimensionalize",
    "sigmoid_friction",
    "sigmoid_friction_deriv",
    "piecewise_friction",
    "rhs",
]

#: Defaults for the smooth friction law. The anisotropy 1.2 keeps the speed-bias
#: ratio of the crawling analysis inside its valid range, and the 0.05 slope keeps
#: the dynamics non-stiff for fixed-step RK4 while staying close to the switching law.
DEFAULT_N_F = 1.2
DEFAULT_EPS_F = 0.05

# Sigmoid argument clamp; exp() stays finite and the tails are exact at double precision.
_U_CLAMP = 500.0


def friction_offset(n_f: float, eps_f: float) -> float:
    """Speed offset that makes the anisotropic sigmoid vanish at zero speed.

    Closed form eps_f * ln(2 / (n_f - 1)); it is the unique algebraic solution,
    and requires n_f > 1 (otherwise the sigmoid has no zero crossing).
    """
    if eps_f <= 0.0:
        raise InvalidParameterError(f"eps_f must be positive, got {eps_f}")
    if n_f <= 1.0:
        raise NoZeroCrossingError(
            f"n_f must exceed 1 for the friction sigmoid to vanish at rest, got {n_f}"
        )
    return eps_f * math.log(2.0 / (n_f - 1.0))


@dataclass(frozen=True)
class FrictionParams:
    """Shape of the anisotropic friction law.

    n_f > 1 tunes the anisotropy, eps_f > 0 the slope of the smooth sigmoid,
    x_offset shifts it so that sigma(0) = 0, and delta = (n_f - 1)/2 is the
    forward-friction level of the matching piecewise-constant law.
    """

    n_f: float = DEFAULT_N_F
    eps_f: float = DEFAULT_EPS_F
    x_offset: float = friction_offset(DEFAULT_N_F, DEFAULT_EPS_F)
    delta: float = (DEFAULT_N_F - 1.0) / 2.0

    @classmethod
    def make(cls, n_f: float = DEFAULT_N_F, eps_f: float = DEFAULT_EPS_F) -> "FrictionParams":
        """Build a consistent parameter set from anisotropy and slope alone."""
        return cls(
            n_f=n_f,
            eps_f=eps_f,
            x_offset=friction_offset(n_f, eps_f),
            delta=0.5 * (n_f - 1.0),
        )

    def __post_init__(self):
        if self.n_f <= 1.0:
            raise NoZeroCrossingError(f"n_f must exceed 1, got {self.n_f}")
        if self.eps_f <= 0.0:
            raise InvalidParameterError(f"eps_f must be positive, got {self.eps_f}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if abs(self.delta - 0.5 * (self.n_f - 1.0)) > 1e-12:
            raise InvalidParameterError("delta is not consistent with n_f")
        at_rest = 0.5 * ((1.0 + self.n_f) / (1.0 + math.exp(self.x_offset / self.eps_f)) + 1.0 - self.n_f)
        if abs(at_rest) > 1e-12:
            raise InvalidParameterError("x_offset does not zero the sigmoid at rest")


@dataclass(frozen=True)
class DimensionalParams:
    """Physical crawler parameters in SI units."""

    m: float
    k: float
    b: float
    A_f: float
    A_sigma: float
    ell: float

    def __post_init__(self):
        for name in ("m", "k", "A_f", "A_sigma", "ell"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)}")
        # b = 0 is admitted so the undamped limit remains expressible.
        if self.b < 0.0:
            raise InvalidParameterError(f"b must be non-negative, got {self.b}")


@dataclass(frozen=True)
class DimensionlessGroups:
    """Complete dimensionless model configuration: the canonical solver input."""

    pi_f: float
    pi_sigma: float
    zeta: float
    friction: FrictionParams = field(default_factory=FrictionParams)

    def __post_init__(self):
        if self.pi_f <= 0.0:
            raise InvalidParameterError(f"pi_f must be positive, got {self.pi_f}")
        if self.pi_sigma < 0.0:
            raise InvalidParameterError(f"pi_sigma must be non-negative, got {self.pi_sigma}")
        if self.zeta < 0.0:
            raise InvalidParameterError(f"zeta must be non-negative, got {self.zeta}")


@dataclass(frozen=True)
class CharacteristicScales:
    """Natural frequency and the temporal/spatial scales it induces."""

    omega_n: float
    t_star: float
    ell_star: float


def nondimensionalize(
    p: DimensionalParams, friction: FrictionParams | None = None
) -> tuple[DimensionlessGroups, CharacteristicScales]:
    """Reduce dimensional parameters to the three governing groups.

    omega_n = sqrt(2k/m) is the undamped natural frequency of the linearized
    body; time is measured in 1/omega_n and lengths in the natural length ell.

    Returns the groups together with the characteristic scales.
    """
    omega_n = math.sqrt(2.0 * p.k / p.m)
    groups = DimensionlessGroups(
        pi_f=p.A_f / (2.0 * p.k * p.ell),
        pi_sigma=p.A_sigma / (2.0 * p.k * p.ell),
        zeta=p.b / math.sqrt(2.0 * p.k * p.m),
        friction=friction if friction is not None else FrictionParams(),
    )
    scales = CharacteristicScales(omega_n=omega_n, t_star=1.0 / omega_n, ell_star=p.ell)
    return groups, scales


def sigmoid_friction(v, fp: FrictionParams):
    """Anisotropic friction force at local speed v (scalar or array).

    Asymmetric sigmoid: tends to 1 for fast backward motion and to
    -delta = (1 - n_f)/2 for fast forward motion, and vanishes at v = 0.
    """
    u = np.clip((np.asarray(v, dtype=float) + fp.x_offset) / fp.eps_f, -_U_CLAMP, _U_CLAMP)
    out = 0.5 * ((1.0 + fp.n_f) / (1.0 + np.exp(u)) + 1.0 - fp.n_f)
    if np.isscalar(v) or np.ndim(v) == 0:
        return float(out)
    return out


def sigmoid_friction_deriv(v, fp: FrictionParams):
    """Exact derivative of :func:`sigmoid_friction` with respect to speed."""
    u = np.clip((np.asarray(v, dtype=float) + fp.x_offset) / fp.eps_f, -_U_CLAMP, _U_CLAMP)
    # e^u / (1 + e^u)^2 written overflow-free.
    core = 1.0 / ((1.0 + np.exp(u)) * (1.0 + np.exp(-u)))
    out = -(1.0 + fp.n_f) / (2.0 * fp.eps_f) * core
    if np.isscalar(v) or np.ndim(v) == 0:
        return float(out)
    return out


def piecewise_friction(v, delta: float):
    """Switching friction law: -delta for v >= 0, 1 for v < 0."""
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    out = np.where(np.asarray(v, dtype=float) >= 0.0, -delta, 1.0)
    if np.isscalar(v) or np.ndim(v) == 0:
        return float(out)
    return out


def rhs(z, f: float, g: DimensionlessGroups) -> np.ndarray:
    """Time derivative of the crawler state z = (z1, z2, z3, z4) under actuation f.

    The strain feels the spring, relative damping and the push-pull actuation;
    friction acts on each nodal speed separately, which is what rectifies the
    oscillation into net center-of-mass motion.
    """
    z1, _, z3, z4 = (float(c) for c in z)
    rel = z3 - z4
    s3 = sigmoid_friction(z3, g.friction)
    s4 = sigmoid_friction(z4, g.friction)
    return np.array(
        [
            rel,
            z3 + z4,
            g.pi_sigma * s3 - 0.5 * z1 - g.zeta * rel + g.pi_f * f,
            g.pi_sigma * s4 + 0.5 * z1 + g.zeta * rel - g.pi_f * f,
        ]
    )
