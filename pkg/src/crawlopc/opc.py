"""Hill-climbing solver for the optimal periodic gait problem.

Each pass solves the periodic state cycle for the current forcing, solves the
periodic co-state along it, and ascends the cost along the pointwise gradient
pi_f*(lambda3 - lambda4) - 2*alpha*f. The stepsize stays fixed unless the
opt-in backtracking is enabled; convergence is declared on a small gradient,
on prolonged cost stagnation, or at the iteration cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolationError,
    CrawlerError,
    InvalidParameterError,
    OpcAbortError,
    StepSizeError,
    UndefinedFrequencyError,
)
from .model import DimensionlessGroups
from .pbvp import (
    CostateTrajectory,
    PeriodicStateSolution,
    _periodic_spline,
    solve_costate_periodic,
    solve_state_periodic,
)
from .sim import (
    DEFAULT_STEPS_PER_PERIOD,
    ForcingSignal,
    SampledForcing,
    cost,
    require_periodic,
)

__all__ = [
    "OpcConfig",
    "IterationRecord",
    "OpcResult",
    "gradient_direction",
    "hill_climb",
    "dominant_frequency",
]

#: Consecutive near-flat cost changes that declare stagnation-convergence.
STAGNATION_RUN = 20
#: Floor below which backtracking gives up shrinking the stepsize.
MIN_EPSILON = 1e-8


@dataclass(frozen=True)
class OpcConfig:
    """Weights, horizon and stopping rules of the gait optimization."""

    alpha: float = 3.3
    beta: float = 0.05
    horizon: float = 2.0 * math.pi
    epsilon: float = 0.01
    grid_n: int = 300
    max_iters: int = 20000
    tol_grad: float = 1e-4
    tol_cost: float = 1e-8

    def __post_init__(self):
        for name in ("alpha", "beta", "horizon", "epsilon", "tol_grad", "tol_cost"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.grid_n < 64:
            raise InvalidParameterError(f"grid_n must be at least 64, got {self.grid_n}")
        if self.max_iters < 1:
            raise InvalidParameterError(f"max_iters must be at least 1, got {self.max_iters}")


@dataclass(frozen=True)
class IterationRecord:
    """One progress row: iteration, cost, gradient sup-norm, shooting residual."""

    iteration: int
    cost: float
    grad_sup: float
    residual: float


@dataclass(frozen=True, eq=False)
class OpcResult:
    """Best iterate of a hill-climb run plus its convergence history."""

    forcing: SampledForcing
    state: PeriodicStateSolution
    costate: CostateTrajectory
    cost_history: np.ndarray
    converged: bool
    iterations: int
    progress: list[IterationRecord] = field(default_factory=list)
    epsilon_final: float = 0.0


def gradient_direction(
    costate: CostateTrajectory,
    forcing_values,
    g: DimensionlessGroups,
    alpha: float,
) -> np.ndarray:
    """Pointwise ascent direction pi_f*(lambda3 - lambda4) - 2*alpha*f.

    Only the difference of the nodal co-states enters, so any common shift of
    lambda3 and lambda4 is invisible. The forcing samples must live on the
    co-state grid.
    """
    f = np.asarray(forcing_values, dtype=float)
    if f.shape != (costate.t_grid.size,):
        raise ContractViolationError(
            f"forcing samples ({f.shape}) do not match the co-state grid ({costate.t_grid.size})"
        )
    lam = costate.lambdas
    return g.pi_f * (lam[:, 2] - lam[:, 3]) - 2.0 * alpha * f


def hill_climb(
    g: DimensionlessGroups,
    cfg: OpcConfig,
    f0: ForcingSignal,
    n_steps: int = DEFAULT_STEPS_PER_PERIOD,
    backtrack: bool = False,
) -> OpcResult:
    """Gradient ascent on the periodic gait cost, starting from forcing f0.

    Every iteration re-solves the periodic state (warm started from the previous
    cycle) and the periodic co-state, then moves the forcing samples along the
    gradient with stepsize epsilon. A cost drop beyond ten stagnation tolerances
    aborts with a stepsize error unless backtracking is enabled, in which case
    epsilon is halved and the step retried. Returns the best iterate seen.
    """
    T = cfg.horizon
    _require_periodic(f0, T)
    node_t = np.arange(cfg.grid_n) * (T / cfg.grid_n)
    f_samples = np.asarray(f0.eval(node_t), dtype=float)
    sig = SampledForcing(T, f_samples)

    def abort(iteration: int, exc: CrawlerError):
        raise OpcAbortError(iteration, str(exc)) from exc

    try:
        state = solve_state_periodic(g, sig, T, n_steps)
    except CrawlerError as exc:
        abort(0, exc)

    def evaluate(st: PeriodicStateSolution):
        cs = solve_costate_periodic(st, g, cfg.beta, cfg.alpha)
        grad = gradient_direction(cs, st.trajectory.forcing, g, cfg.alpha)
        return cs, grad, float(np.max(np.abs(grad)))

    try:
        costate, grad_grid, grad_sup = evaluate(state)
    except CrawlerError as exc:
        abort(0, exc)
    J = cost(state.trajectory, cfg.alpha, cfg.beta).total

    history = [J]
    progress = [IterationRecord(0, J, grad_sup, state.residual)]
    best = (J, f_samples.copy(), state, costate, 0)
    eps = cfg.epsilon
    stagnation = 0
    converged = False
    iteration = 0

    while iteration < cfg.max_iters:
        if grad_sup < cfg.tol_grad or stagnation >= STAGNATION_RUN:
            converged = True
            break
        iteration += 1

        # The gradient lives on the integration grid; move the forcing samples
        # along its periodic-spline resampling at the forcing nodes.
        t_grid = state.trajectory.t_grid
        delta_nodes = _periodic_spline(t_grid, grad_grid)(node_t)
        cand_samples = f_samples + eps * delta_nodes
        cand_sig = SampledForcing(T, cand_samples)
        warm = state.trajectory.states[0, [0, 2, 3]]
        try:
            cand_state = solve_state_periodic(g, cand_sig, T, n_steps, guess=warm)
        except CrawlerError as exc:
            abort(iteration, exc)
        cand_J = cost(cand_state.trajectory, cfg.alpha, cfg.beta).total

        if cand_J < J - 10.0 * cfg.tol_cost:
            if backtrack and eps > MIN_EPSILON:
                eps *= 0.5
                continue
            raise StepSizeError(
                f"cost fell from {J:.9g} to {cand_J:.9g} at iteration {iteration}; "
                f"reduce the stepsize (epsilon = {eps:.3g})"
            )

        f_samples = cand_samples
        state = cand_state
        try:
            costate, grad_grid, grad_sup = evaluate(state)
        except CrawlerError as exc:
            abort(iteration, exc)
        stagnation = stagnation + 1 if abs(cand_J - J) < cfg.tol_cost else 0
        J = cand_J
        history.append(J)
        progress.append(IterationRecord(iteration, J, grad_sup, state.residual))
        if J > best[0]:
            best = (J, f_samples.copy(), state, costate, iteration)

    return OpcResult(
        forcing=SampledForcing(T, best[1]),
        state=best[2],
        costate=best[3],
        cost_history=np.asarray(history),
        converged=converged,
        iterations=iteration,
        progress=progress,
        epsilon_final=eps,
    )


def dominant_frequency(forcing: SampledForcing) -> tuple[int, float]:
    """Strongest harmonic of a sampled periodic waveform and its share of the AC power.

    The harmonic index counts whole cycles per period; a pure sin(3t) over a
    2*pi horizon reports (3, ~1.0). Signals with no oscillating component have
    no dominant frequency.
    """
    if not isinstance(forcing, SampledForcing):
        raise ContractViolationError("dominant frequency analysis needs a sampled waveform")
    spectrum = np.fft.rfft(forcing.values)
    power = np.abs(spectrum) ** 2
    ac = power[1:]
    total = float(np.sum(ac))
    if total <= 0.0:
        raise UndefinedFrequencyError("signal has no oscillating component")
    k = int(np.argmax(ac)) + 1
    return k, float(ac[k - 1] / total)
