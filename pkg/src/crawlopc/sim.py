"""Forcing signals, fixed-step time integration, trajectory metrics, and the gait cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ContractViolationError, DivergenceError, InvalidParameterError
from .model import DimensionlessGroups, sigmoid_friction

__all__ = [
    "ForcingSignal",
    "SinusoidForcing",
    "SampledForcing",
    "Trajectory",
    "TrajectoryMetrics",
    "CostBreakdown",
    "eval_forcing",
    "require_periodic",
    "integrate",
    "metrics",
    "cost",
    "frequency_sweep",
]

DEFAULT_STEPS_PER_PERIOD = 1024
DEFAULT_SETTLE_CYCLES = 30
DEFAULT_MEASURE_CYCLES = 10

_trapz = getattr(np, "trapezoid", None) or np.trapz


class ForcingSignal:
    """Periodic scalar actuation waveform, evaluable at arbitrary times."""

    def eval(self, t):
        raise NotImplementedError

    def stage_values(self, horizon: float, n_steps: int) -> np.ndarray:
        """Samples on the RK4 stage grid: 2*n_steps + 1 points spaced horizon/(2*n_steps)."""
        return np.asarray(self.eval(np.linspace(0.0, horizon, 2 * n_steps + 1)), dtype=float)


@dataclass(frozen=True)
class SinusoidForcing(ForcingSignal):
    """f(t) = amplitude * sin(omega*t + phase)."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise InvalidParameterError(f"amplitude must be non-negative, got {self.amplitude}")
        if self.omega <= 0.0:
            raise InvalidParameterError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def eval(self, t):
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float) + self.phase)


@dataclass(frozen=True, eq=False)
class SampledForcing(ForcingSignal):
    """Periodic waveform given by uniform samples over one period.

    values[j] is the signal at t = j*period/len(values); evaluation anywhere uses
    a closed periodic cubic spline, so the integrator can query half-steps and the
    gait optimizer can treat the samples themselves as decision variables.
    """

    period: float
    values: np.ndarray

    def __post_init__(self):
        if self.period <= 0.0:
            raise InvalidParameterError(f"period must be positive, got {self.period}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 8:
            raise InvalidParameterError("sampled forcing needs at least 8 uniform samples")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("sampled forcing contains non-finite values")
        object.__setattr__(self, "values", vals)

    @cached_property
    def _spline(self) -> CubicSpline:
        n = self.values.size
        knots = np.linspace(0.0, self.period, n + 1)
        closed = np.append(self.values, self.values[0])
        return CubicSpline(knots, closed, bc_type="periodic", extrapolate="periodic")

    def eval(self, t):
        out = self._spline(np.asarray(t, dtype=float))
        if np.ndim(t) == 0:
            return float(out)
        return out


def eval_forcing(sig: ForcingSignal, t):
    """Evaluate a forcing signal at time(s) t."""
    return sig.eval(t)


def require_periodic(sig: ForcingSignal, horizon: float) -> None:
    """Reject forcing that does not repeat over the given horizon.

    Sinusoids must complete whole cycles, sampled waveforms must fit a whole
    number of periods; other signal types are probed pointwise.
    """
    if isinstance(sig, SinusoidForcing):
        if sig.amplitude == 0.0:
            return
        cycles = sig.omega * horizon / (2.0 * math.pi)
    elif isinstance(sig, SampledForcing):
        cycles = horizon / sig.period
    else:
        probe = np.array([0.0, 0.3 * horizon, 0.7 * horizon])
        gap = np.max(np.abs(np.asarray(sig.eval(probe + horizon)) - np.asarray(sig.eval(probe))))
        if gap > 1e-9:
            raise ContractViolationError("forcing is not periodic over the horizon")
        return
    if abs(cycles - round(cycles)) > 1e-9 or round(cycles) < 1:
        raise ContractViolationError(
            f"forcing does not complete whole cycles over the horizon (got {cycles:.6g})"
        )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniform-grid record of a simulated state history and the forcing that drove it."""

    t_grid: np.ndarray
    states: np.ndarray
    forcing: np.ndarray
    groups: DimensionlessGroups

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        z = np.asarray(self.states, dtype=float)
        f = np.asarray(self.forcing, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise InvalidParameterError("trajectory needs at least two grid points")
        if z.shape != (t.size, 4) or f.shape != (t.size,):
            raise InvalidParameterError("trajectory arrays have inconsistent shapes")
        h = (t[-1] - t[0]) / (t.size - 1)
        if h <= 0.0 or np.max(np.abs(np.diff(t) - h)) > 1e-9 * max(1.0, abs(t[-1])):
            raise InvalidParameterError("trajectory grid must be uniform and increasing")
        if not np.all(np.isfinite(z)):
            raise InvalidParameterError("trajectory states must be finite")
        if not np.all(np.isfinite(f)):
            raise InvalidParameterError("trajectory forcing must be finite")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "states", z)
        object.__setattr__(self, "forcing", f)

    @property
    def horizon(self) -> float:
        return float(self.t_grid[-1] - self.t_grid[0])

    @property
    def z1(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def z2(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def z3(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def z4(self) -> np.ndarray:
        return self.states[:, 3]


@dataclass(frozen=True)
class TrajectoryMetrics:
    avg_com_speed: float
    strain_amplitude: float
    mean_total_friction: float
    min_power: float


@dataclass(frozen=True)
class CostBreakdown:
    """Average-cost split: net displacement reward minus effort and strain penalties."""

    displacement_term: float
    effort_term: float
    strain_term: float
    total: float


# Magnitude beyond which the integration is declared divergent.
_DIVERGENCE_LIMIT = 1e12


def _rk4_scan(z0, f_stage, n_steps: int, h: float, g: DimensionlessGroups, collect: bool):
    """Classical RK4 over n_steps fixed steps.

    f_stage must hold 2*n_steps + 1 forcing samples spaced h/2 (a plain list for
    speed). Returns the full path as an (n_steps+1, 4) array when collect is True,
    otherwise just the final state tuple. This scalar loop is the hot path of the
    whole package; keep it free of numpy per-step overhead.
    """
    z1, z2, z3, z4 = (float(c) for c in z0)
    pf = g.pi_f
    ps = g.pi_sigma
    zt = g.zeta
    fr = g.friction
    nf1 = 1.0 + fr.n_f
    mnf = 1.0 - fr.n_f
    xoff = fr.x_offset
    ie = 1.0 / fr.eps_f
    exp = math.exp
    h2 = 0.5 * h
    h6 = h / 6.0
    lim = _DIVERGENCE_LIMIT

    def acc(a1, a3, a4, fv):
        u3 = (a3 + xoff) * ie
        if u3 > 500.0:
            u3 = 500.0
        elif u3 < -500.0:
            u3 = -500.0
        u4 = (a4 + xoff) * ie
        if u4 > 500.0:
            u4 = 500.0
        elif u4 < -500.0:
            u4 = -500.0
        s3 = 0.5 * (nf1 / (1.0 + exp(u3)) + mnf)
        s4 = 0.5 * (nf1 / (1.0 + exp(u4)) + mnf)
        rel = a3 - a4
        spring = 0.5 * a1
        damp = zt * rel
        drive = pf * fv
        return (
            rel,
            a3 + a4,
            ps * s3 - spring - damp + drive,
            ps * s4 + spring + damp - drive,
        )

    out = [(z1, z2, z3, z4)] if collect else None
    for j in range(n_steps):
        base = 2 * j
        f0 = f_stage[base]
        fm = f_stage[base + 1]
        f1 = f_stage[base + 2]
        k1a, k1b, k1c, k1d = acc(z1, z3, z4, f0)
        u1 = z1 + h2 * k1a
        u3 = z3 + h2 * k1c
        u4 = z4 + h2 * k1d
        k2a, k2b, k2c, k2d = acc(u1, u3, u4, fm)
        u1 = z1 + h2 * k2a
        u3 = z3 + h2 * k2c
        u4 = z4 + h2 * k2d
        k3a, k3b, k3c, k3d = acc(u1, u3, u4, fm)
        u1 = z1 + h * k3a
        u3 = z3 + h * k3c
        u4 = z4 + h * k3d
        k4a, k4b, k4c, k4d = acc(u1, u3, u4, f1)
        z1 += h6 * (k1a + 2.0 * (k2a + k3a) + k4a)
        z2 += h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
        z3 += h6 * (k1c + 2.0 * (k2c + k3c) + k4c)
        z4 += h6 * (k1d + 2.0 * (k2d + k3d) + k4d)
        if not (-lim < z1 < lim and -lim < z3 < lim and -lim < z4 < lim):
            raise DivergenceError((j + 1) * h)
        if collect:
            out.append((z1, z2, z3, z4))
    if collect:
        return np.array(out)
    return z1, z2, z3, z4


def integrate(
    z0,
    sig: ForcingSignal,
    g: DimensionlessGroups,
    horizon: float,
    n_steps: int,
) -> Trajectory:
    """Integrate the crawler over [0, horizon] with fixed-step classical RK4.

    The step is horizon/n_steps; all intermediate states and the forcing samples
    on the grid are stored in the returned :class:`Trajectory`.
    """
    if horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon}")
    if n_steps < 16:
        raise InvalidParameterError(f"need at least 16 steps, got {n_steps}")
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (4,) or not np.all(np.isfinite(z0)):
        raise InvalidParameterError("initial state must be 4 finite components")
    stage = sig.stage_values(horizon, n_steps)
    path = _rk4_scan(tuple(z0), stage.tolist(), n_steps, horizon / n_steps, g, collect=True)
    return Trajectory(
        t_grid=np.linspace(0.0, horizon, n_steps + 1),
        states=path,
        forcing=stage[::2].copy(),
        groups=g,
    )


def metrics(traj: Trajectory) -> TrajectoryMetrics:
    """Locomotion summary of a trajectory.

    avg_com_speed is the net center-of-mass displacement rate (z2 counts it twice);
    mean_total_friction averages sigma(z3) + sigma(z4), which vanishes over any
    periodic cycle; min_power is the smallest instantaneous actuation power
    f * (z3 - z4).
    """
    T = traj.horizon
    fr = traj.groups.friction
    total_friction = sigmoid_friction(traj.z3, fr) + sigmoid_friction(traj.z4, fr)
    power = traj.forcing * (traj.z3 - traj.z4)
    return TrajectoryMetrics(
        avg_com_speed=float((traj.z2[-1] - traj.z2[0]) / (2.0 * T)),
        strain_amplitude=float(np.max(np.abs(traj.z1))),
        mean_total_friction=float(_trapz(total_friction, traj.t_grid) / T),
        min_power=float(np.min(power)),
    )


def cost(traj: Trajectory, alpha: float, beta: float) -> CostBreakdown:
    """Time-averaged gait objective: displacement reward minus effort and strain penalties.

    Requires z2(0) = 0 so that z2(T) is the accumulated displacement. Integrals use
    the trapezoidal rule on the trajectory grid, which is spectrally accurate for
    periodic integrands.
    """
    if traj.z2[0] != 0.0:
        raise ContractViolationError(f"cost requires z2(0) = 0, got {traj.z2[0]!r}")
    if alpha < 0.0 or beta < 0.0:
        raise InvalidParameterError("cost weights must be non-negative")
    T = traj.horizon
    displacement = float(traj.z2[-1] / T)
    effort = float(alpha / T * _trapz(traj.forcing**2, traj.t_grid))
    strain = float(beta / T * _trapz(traj.z1**2, traj.t_grid))
    return CostBreakdown(
        displacement_term=displacement,
        effort_term=effort,
        strain_term=strain,
        total=displacement - effort - strain,
    )


def frequency_sweep(
    g: DimensionlessGroups,
    amplitude: float,
    omega_grid,
    settle_cycles: int = DEFAULT_SETTLE_CYCLES,
    measure_cycles: int = DEFAULT_MEASURE_CYCLES,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> list[tuple[float, float]]:
    """Steady-state average CoM speed under unit-phase sinusoidal forcing, per frequency.

    Each frequency is integrated from rest for settle_cycles periods (transients
    decay like exp(-zeta*t)), then the speed is averaged over measure_cycles more.
    """
    omegas = [float(w) for w in omega_grid]
    if any(w <= 0.0 for w in omegas):
        raise InvalidParameterError("omega grid must be positive")
    if amplitude < 0.0:
        raise InvalidParameterError("amplitude must be non-negative")
    if settle_cycles < 10:
        raise InvalidParameterError("need at least 10 settle cycles")
    if measure_cycles < 1:
        raise InvalidParameterError("need at least 1 measure cycle")

    out: list[tuple[float, float]] = []
    for w in omegas:
        period = 2.0 * math.pi / w
        h = period / steps_per_period
        sig = SinusoidForcing(amplitude, w)
        try:
            n_settle = settle_cycles * steps_per_period
            stage = sig.stage_values(settle_cycles * period, n_settle).tolist()
            settled = _rk4_scan((0.0, 0.0, 0.0, 0.0), stage, n_settle, h, g, collect=False)
            # Whole settling periods keep the forcing phase aligned at the window seam.
            n_meas = measure_cycles * steps_per_period
            stage_m = sig.stage_values(measure_cycles * period, n_meas).tolist()
            final = _rk4_scan(settled, stage_m, n_meas, h, g, collect=False)
        except DivergenceError as exc:
            raise DivergenceError(exc.time, f"divergence at omega = {w:.6g}: {exc}") from exc
        v = (final[1] - settled[1]) / (2.0 * measure_cycles * period)
        out.append((w, float(v)))
    return out
