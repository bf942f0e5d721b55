"""Periodic boundary-value solvers for the crawling cycle.

The state cycle (periodic in z1, z3, z4 with z2(0) = 0) is found by Newton
shooting on the 3-dimensional return map; z2 does not feed back into the other
components, so it rides along as the accumulated displacement. The co-state
cycle is linear once the state is known: with lambda2 pinned to 1 by its
boundary condition, the remaining components satisfy a 3-dimensional affine
periodic system that a monodromy matrix turns into one linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateCycleError,
    InvalidParameterError,
    NoPeriodicOrbitError,
    ResonantAdjointError,
)
from .model import DimensionlessGroups, sigmoid_friction_deriv
from .sim import DEFAULT_SETTLE_CYCLES, ForcingSignal, Trajectory, _rk4_scan, require_periodic

__all__ = [
    "PeriodicStateSolution",
    "CostateTrajectory",
    "solve_state_periodic",
    "costate_matrix",
    "monodromy",
    "solve_costate_periodic",
]

SHOOTING_MAX_ITERS = 50
#: Target residual; Newton usually lands far below the 1e-9 acceptance level.
SHOOTING_TOL = 1e-12
SHOOTING_ACCEPT = 1e-9
FD_STEP = 1e-7


@dataclass(frozen=True, eq=False)
class PeriodicStateSolution:
    """A closed crawling cycle: trajectory over one horizon plus closure diagnostics."""

    trajectory: Trajectory
    residual: float
    newton_iters: int


@dataclass(frozen=True, eq=False)
class CostateTrajectory:
    """Periodic co-state on the state grid; lambda2 is identically 1."""

    t_grid: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.shape != (t.size, 4):
            raise InvalidParameterError("co-state array must be (len(t_grid), 4)")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "lambdas", lam)


def _flow(xi, stage, n_steps, h, g):
    """Map the reduced initial condition (z1, z3, z4), z2(0)=0, to its value after one horizon."""
    z1, _, z3, z4 = _rk4_scan((xi[0], 0.0, xi[1], xi[2]), stage, n_steps, h, g, collect=False)
    return np.array([z1, z3, z4])


def solve_state_periodic(
    g: DimensionlessGroups,
    sig: ForcingSignal,
    horizon: float,
    n_steps: int,
    guess=None,
) -> PeriodicStateSolution:
    """Find the periodic crawling cycle for a given periodic forcing.

    Newton iteration on the return-map residual of (z1, z3, z4)(0), with a
    forward-difference Jacobian (step 1e-7) that is reused across steps and
    refreshed only when the contraction degrades. Without a guess, the cycle is
    approached by integrating from rest for a settling stretch first; pass the
    previous cycle's initial condition to warm start.
    """
    if horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon}")
    if n_steps < 16:
        raise InvalidParameterError(f"need at least 16 steps, got {n_steps}")
    require_periodic(sig, horizon)
    h = horizon / n_steps
    stage = sig.stage_values(horizon, n_steps).tolist()

    if guess is None:
        settled = (0.0, 0.0, 0.0, 0.0)
        for _ in range(DEFAULT_SETTLE_CYCLES):
            settled = _rk4_scan(settled, stage, n_steps, h, g, collect=False)
        xi = np.array([settled[0], settled[2], settled[3]])
    else:
        xi = np.asarray(guess, dtype=float)
        if xi.shape != (3,) or not np.all(np.isfinite(xi)):
            raise InvalidParameterError("guess must be 3 finite components (z1, z3, z4)")
        xi = xi.copy()

    def residual(x):
        return _flow(x, stage, n_steps, h, g) - x

    r = residual(xi)
    res = float(np.max(np.abs(r)))
    jac = None
    jac_fresh = False
    iters = 0
    while res > SHOOTING_TOL and iters < SHOOTING_MAX_ITERS:
        if jac is None:
            jac = np.empty((3, 3))
            for i in range(3):
                bumped = xi.copy()
                bumped[i] += FD_STEP
                jac[:, i] = (residual(bumped) - r) / FD_STEP
            jac_fresh = True
        if not np.all(np.isfinite(jac)):
            raise DegenerateCycleError("shooting Jacobian is not finite")
        try:
            dx = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise DegenerateCycleError("shooting Jacobian is singular") from exc
        cand = xi - dx
        rc = residual(cand)
        resc = float(np.max(np.abs(rc)))
        iters += 1
        if resc < res or resc <= SHOOTING_TOL:
            stalled = res < SHOOTING_ACCEPT and resc > 0.25 * res
            xi, r, res = cand, rc, resc
            jac_fresh = False
            if stalled:
                break  # roundoff floor; the cycle is closed as tightly as RK4 allows
        elif not jac_fresh:
            jac = None  # stale Jacobian; rebuild at the current point
        else:
            for lam in (0.5, 0.25, 0.125, 0.0625):
                cand = xi - lam * dx
                rc = residual(cand)
                resc = float(np.max(np.abs(rc)))
                if resc < res:
                    xi, r, res = cand, rc, resc
                    jac_fresh = False
                    break
            else:
                raise NoPeriodicOrbitError(res, iters)
    if res > SHOOTING_ACCEPT:
        raise NoPeriodicOrbitError(res, iters)

    path = _rk4_scan((xi[0], 0.0, xi[1], xi[2]), stage, n_steps, h, g, collect=True)
    traj = Trajectory(
        t_grid=np.linspace(0.0, horizon, n_steps + 1),
        states=path,
        forcing=np.asarray(stage[::2], dtype=float),
        groups=g,
    )
    closure = float(
        np.max(np.abs(path[-1, [0, 2, 3]] - path[0, [0, 2, 3]]))
    )
    return PeriodicStateSolution(trajectory=traj, residual=closure, newton_iters=iters)


def costate_matrix(z, g: DimensionlessGroups, beta: float):
    """Coefficients of the co-state dynamics lambda' = M(z) lambda + c(z) at one state.

    M is minus the transposed state Jacobian; the strain penalty enters through
    c = (2*beta*z1, 0, 0, 0). Row 2 of M vanishes, which is why lambda2 stays
    constant along any co-state solution.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (4,) or not np.all(np.isfinite(z)):
        raise InvalidParameterError("state must be 4 finite components")
    zt = g.zeta
    ps = g.pi_sigma
    fr = g.friction
    sp3 = sigmoid_friction_deriv(z[2], fr)
    sp4 = sigmoid_friction_deriv(z[3], fr)
    M = np.array(
        [
            [0.0, 0.0, 0.5, -0.5],
            [0.0, 0.0, 0.0, 0.0],
            [-1.0, -1.0, zt - ps * sp3, -zt],
            [1.0, -1.0, -zt, zt - ps * sp4],
        ]
    )
    c = np.array([2.0 * beta * z[0], 0.0, 0.0, 0.0])
    return M, c


def monodromy(m_samples, c_samples, horizon: float, return_history: bool = False):
    """Fundamental matrix and particular offset of an affine linear ODE over one horizon.

    Integrates Phi' = M(t) Phi from the identity and p' = M(t) p + c(t) from zero
    with classical RK4. The coefficient samples must sit on the half-step stage
    grid: 2*n + 1 entries for n steps, so every RK4 stage uses an exact sample.
    Returns (Phi(T), p(T)); with return_history also the per-grid-point arrays.
    """
    M = np.asarray(m_samples, dtype=float)
    c = np.asarray(c_samples, dtype=float)
    if M.ndim != 3 or M.shape[1] != M.shape[2]:
        raise InvalidParameterError("matrix samples must be (2n+1, d, d)")
    n_stage = M.shape[0]
    if n_stage < 3 or n_stage % 2 == 0:
        raise InvalidParameterError("need 2n+1 half-step samples with n >= 1")
    d = M.shape[1]
    if c.shape != (n_stage, d):
        raise InvalidParameterError("offset samples must be (2n+1, d)")
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(c))):
        raise InvalidParameterError("coefficient samples must be finite")
    if horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon}")

    n_steps = (n_stage - 1) // 2
    h = horizon / n_steps
    h2 = 0.5 * h
    h6 = h / 6.0

    # Augmented unknown Y = [Phi | p] obeys Y' = M Y + [0 | c].
    Y = np.zeros((d, d + 1))
    Y[:, :d] = np.eye(d)
    if return_history:
        phi_hist = np.empty((n_steps + 1, d, d))
        p_hist = np.empty((n_steps + 1, d))
        phi_hist[0] = Y[:, :d]
        p_hist[0] = Y[:, d]

    for j in range(n_steps):
        base = 2 * j
        M0, Mm, M1 = M[base], M[base + 1], M[base + 2]
        c0, cm, c1 = c[base], c[base + 1], c[base + 2]
        k1 = M0 @ Y
        k1[:, d] += c0
        k2 = Mm @ (Y + h2 * k1)
        k2[:, d] += cm
        k3 = Mm @ (Y + h2 * k2)
        k3[:, d] += cm
        k4 = M1 @ (Y + h * k3)
        k4[:, d] += c1
        Y = Y + h6 * (k1 + 2.0 * (k2 + k3) + k4)
        if return_history:
            phi_hist[j + 1] = Y[:, :d]
            p_hist[j + 1] = Y[:, d]

    if return_history:
        return Y[:, :d], Y[:, d], phi_hist, p_hist
    return Y[:, :d], Y[:, d]


def _periodic_spline(t, y):
    closed = y.copy()
    closed[-1] = closed[0]
    return CubicSpline(t, closed, bc_type="periodic", extrapolate="periodic")


def solve_costate_periodic(
    sol: PeriodicStateSolution,
    g: DimensionlessGroups,
    beta: float,
    alpha: float = 0.0,
) -> CostateTrajectory:
    """Periodic co-state along a closed state cycle.

    lambda2 is 1 identically (its row of the dynamics vanishes and its terminal
    condition is 1), which leaves a 3-dimensional affine periodic system in
    (lambda1, lambda3, lambda4): the lambda2 column and the strain penalty feed
    the offset. The periodic initial value solves (I - Phi) x = p; the effort
    weight alpha does not enter the co-state and is accepted only so call sites
    can pass the full weight pair.
    """
    if beta < 0.0 or alpha < 0.0:
        raise InvalidParameterError("cost weights must be non-negative")
    traj = sol.trajectory
    t = traj.t_grid
    if t[0] != 0.0:
        raise InvalidParameterError("periodic cycles are indexed from t = 0")
    n_steps = t.size - 1
    T = traj.horizon

    # Coefficients are needed at RK4 half-steps; the cycle is periodic and smooth,
    # so closed cubic splines of the stored states keep the integrator at order 4.
    ts = np.linspace(0.0, T, 2 * n_steps + 1)
    z1s = _periodic_spline(t, traj.z1)(ts)
    z3s = _periodic_spline(t, traj.z3)(ts)
    z4s = _periodic_spline(t, traj.z4)(ts)

    fr = g.friction
    d33 = g.zeta - g.pi_sigma * sigmoid_friction_deriv(z3s, fr)
    d44 = g.zeta - g.pi_sigma * sigmoid_friction_deriv(z4s, fr)

    m_samples = np.zeros((ts.size, 3, 3))
    m_samples[:, 0, 1] = 0.5
    m_samples[:, 0, 2] = -0.5
    m_samples[:, 1, 0] = -1.0
    m_samples[:, 1, 1] = d33
    m_samples[:, 1, 2] = -g.zeta
    m_samples[:, 2, 0] = 1.0
    m_samples[:, 2, 1] = -g.zeta
    m_samples[:, 2, 2] = d44

    c_samples = np.empty((ts.size, 3))
    c_samples[:, 0] = 2.0 * beta * z1s
    c_samples[:, 1] = -1.0  # lambda2 = 1 through M[2][1]
    c_samples[:, 2] = -1.0  # lambda2 = 1 through M[3][1]

    phi, p, phi_hist, p_hist = monodromy(m_samples, c_samples, T, return_history=True)

    closure = np.eye(3) - phi
    svals = np.linalg.svd(closure, compute_uv=False)
    if svals[-1] < 1e-10 * max(1.0, svals[0]):
        raise ResonantAdjointError(
            "(I - Phi) is singular to tolerance 1e-10: periodic co-state is not unique"
        )
    lam0 = np.linalg.solve(closure, p)

    reduced = phi_hist @ lam0 + p_hist
    lambdas = np.empty((t.size, 4))
    lambdas[:, 0] = reduced[:, 0]
    lambdas[:, 1] = 1.0
    lambdas[:, 2] = reduced[:, 1]
    lambdas[:, 3] = reduced[:, 2]
    return CostateTrajectory(t_grid=t.copy(), lambdas=lambdas)
