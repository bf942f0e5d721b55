import math

import numpy as np
import pytest

from crawlopc import (
    DimensionlessGroups,
    FrictionParams,
    ResonantAdjointError,
    SampledForcing,
    SinusoidForcing,
    cost,
    costate_matrix,
    integrate,
    metrics,
    monodromy,
    sigmoid_friction_deriv,
    solve_costate_periodic,
    solve_state_periodic,
)
from crawlopc.pbvp import _periodic_spline

CASE = DimensionlessGroups(1.0, 1.0, 0.2236)
TWO_PI = 2.0 * math.pi
N = 1024


@pytest.fixture(scope="module")
def case_cycle():
    return solve_state_periodic(CASE, SinusoidForcing(1.0, 1.0), TWO_PI, N)


def test_zero_forcing_gives_equilibrium_cycle():
    sol = solve_state_periodic(CASE, SinusoidForcing(0.0, 1.0), TWO_PI, 256)
    assert sol.residual < 1e-12
    assert np.max(np.abs(sol.trajectory.states)) < 1e-10
    assert sol.trajectory.z2[0] == 0.0


def test_linear_cycle_matches_frequency_response():
    # Without friction the strain is a damped driven oscillator with a closed form.
    lin = DimensionlessGroups(1.0, 0.0, 0.2236)
    for omega in (1.0, 0.7):
        T = TWO_PI / omega
        sol = solve_state_periodic(lin, SinusoidForcing(1.0, omega), T, N)
        t = sol.trajectory.t_grid
        # (1 - w^2) Ac + 2 zeta w As = 0 ; (1 - w^2) As - 2 zeta w Ac = 2 pi_f
        det = (1 - omega**2) ** 2 + (2 * lin.zeta * omega) ** 2
        a_s = 2 * lin.pi_f * (1 - omega**2) / det
        a_c = -2 * lin.pi_f * 2 * lin.zeta * omega / det
        s = a_c * np.cos(omega * t) + a_s * np.sin(omega * t)
        s_dot = omega * (-a_c * np.sin(omega * t) + a_s * np.cos(omega * t))
        assert np.max(np.abs(sol.trajectory.z1 - s)) < 1e-6
        assert np.max(np.abs(sol.trajectory.z3 - 0.5 * s_dot)) < 1e-6
        assert np.max(np.abs(sol.trajectory.z4 + 0.5 * s_dot)) < 1e-6


def test_cycle_is_transient_limit(case_cycle):
    cycles = 50
    traj = integrate(np.zeros(4), SinusoidForcing(1.0, 1.0), CASE, cycles * TWO_PI, cycles * N)
    last = traj.states[-(N + 1):]
    ref = case_cycle.trajectory.states
    for col in (0, 2, 3):
        assert np.max(np.abs(last[:, col] - ref[:, col])) < 1e-5
    # displacement accumulates; compare its per-cycle increment shape
    dz2_settled = last[:, 1] - last[0, 1]
    assert np.max(np.abs(dz2_settled - ref[:, 1])) < 1e-5


def test_cycle_invariants(case_cycle):
    sol = case_cycle
    assert sol.residual < 1e-9
    assert sol.trajectory.z2[0] == 0.0
    assert abs(metrics(sol.trajectory).mean_total_friction) < 1e-6


def test_shooting_restart_returns_same_cycle(case_cycle):
    xi = case_cycle.trajectory.states[0, [0, 2, 3]]
    again = solve_state_periodic(CASE, SinusoidForcing(1.0, 1.0), TWO_PI, N, guess=xi + 1e-4)
    xi2 = again.trajectory.states[0, [0, 2, 3]]
    assert np.max(np.abs(xi2 - xi)) < 1e-8


def test_costate_matrix_structure():
    M, c = costate_matrix(np.zeros(4), CASE, beta=0.0)
    assert np.allclose(M[0], [0.0, 0.0, 0.5, -0.5])
    assert np.allclose(M[1], 0.0)
    assert np.allclose(c, 0.0)
    # strain penalty enters only through the first offset component
    _, c2 = costate_matrix(np.array([2.0, 0.3, -0.4, 0.9]), CASE, beta=0.05)
    assert np.allclose(c2, [0.2, 0.0, 0.0, 0.0])
    # friction slopes sit on the diagonal of the speed block
    z = np.array([0.1, 0.0, 0.7, -0.2])
    M3, _ = costate_matrix(z, CASE, beta=0.0)
    fr = CASE.friction
    assert M3[2, 2] == pytest.approx(CASE.zeta - CASE.pi_sigma * sigmoid_friction_deriv(0.7, fr))
    assert M3[3, 3] == pytest.approx(CASE.zeta - CASE.pi_sigma * sigmoid_friction_deriv(-0.2, fr))
    assert M3[2, 3] == -CASE.zeta and M3[3, 2] == -CASE.zeta


def _stage_grid(T, n):
    return np.linspace(0.0, T, 2 * n + 1)


def test_monodromy_zero_matrix_accumulates_offset():
    T, n = 1.0, 512
    ts = _stage_grid(T, n)
    m = np.zeros((ts.size, 2, 2))
    c = np.stack([np.sin(ts), np.cos(2 * ts)], axis=1)
    phi, psi = monodromy(m, c, T)
    assert np.allclose(phi, np.eye(2), atol=0.0)
    assert psi[0] == pytest.approx(1.0 - math.cos(T), abs=1e-10)
    assert psi[1] == pytest.approx(math.sin(2 * T) / 2, abs=1e-10)


def test_monodromy_constant_diagonal():
    T, n = 1.5, 1024
    ts = _stage_grid(T, n)
    d = np.array([-0.3, 0.2, 1.0])
    m = np.tile(np.diag(d), (ts.size, 1, 1))
    c = np.zeros((ts.size, 3))
    phi, psi = monodromy(m, c, T)
    assert np.allclose(phi, np.diag(np.exp(d * T)), atol=1e-9)
    assert np.allclose(psi, 0.0)


def test_monodromy_self_convergence():
    T = 2.0
    rng = np.random.default_rng(9)
    amp = rng.uniform(-0.5, 0.5, size=(3, 3, 3))

    def m_of(ts):
        out = np.zeros((ts.size, 3, 3))
        for k in range(3):
            out += amp[k][None, :, :] * np.cos((k + 1) * ts + k)[:, None, None]
        return out

    def run(n):
        ts = _stage_grid(T, n)
        return monodromy(m_of(ts), np.zeros((ts.size, 3)), T)[0]

    assert np.max(np.abs(run(256) - run(2560))) < 1e-8


def test_costate_identities(case_cycle):
    cs = solve_costate_periodic(case_cycle, CASE, beta=0.05, alpha=3.3)
    lam = cs.lambdas
    assert np.all(lam[:, 1] == 1.0)
    assert np.max(np.abs(lam[-1, [0, 2, 3]] - lam[0, [0, 2, 3]])) < 1e-9


def test_costate_consistent_with_monodromy(case_cycle):
    beta = 0.05
    cs = solve_costate_periodic(case_cycle, CASE, beta=beta)
    traj = case_cycle.trajectory
    t = traj.t_grid
    n = t.size - 1
    ts = np.linspace(0.0, traj.horizon, 2 * n + 1)
    z1s = _periodic_spline(t, traj.z1)(ts)
    z3s = _periodic_spline(t, traj.z3)(ts)
    z4s = _periodic_spline(t, traj.z4)(ts)
    m_samples = np.empty((ts.size, 3, 3))
    c_samples = np.empty((ts.size, 3))
    for i in range(ts.size):
        M4, c4 = costate_matrix(np.array([z1s[i], 0.0, z3s[i], z4s[i]]), CASE, beta)
        idx = [0, 2, 3]
        m_samples[i] = M4[np.ix_(idx, idx)]
        c_samples[i] = c4[idx] + M4[idx, 1]  # lambda2 = 1 column folded into the offset
    phi, p = monodromy(m_samples, c_samples, traj.horizon)
    lam0 = cs.lambdas[0, [0, 2, 3]]
    lam_T = cs.lambdas[-1, [0, 2, 3]]
    assert np.max(np.abs(phi @ lam0 + p - lam_T)) < 1e-10


def test_costate_affine_in_strain_weight(case_cycle):
    lam = lambda b: solve_costate_periodic(case_cycle, CASE, beta=b).lambdas
    combo = lam(0.03) + lam(0.07) - lam(0.0)
    assert np.max(np.abs(combo - lam(0.10))) < 1e-8


def test_adjoint_matches_finite_difference():
    alpha, beta = 3.3, 0.05
    nodes = 300
    node_t = np.arange(nodes) * (TWO_PI / nodes)
    base = np.sin(node_t)

    def total_cost(samples, guess=None):
        sol = solve_state_periodic(CASE, SampledForcing(TWO_PI, samples), TWO_PI, N, guess=guess)
        return cost(sol.trajectory, alpha, beta).total, sol

    _, sol0 = total_cost(base)
    cs = solve_costate_periodic(sol0, CASE, beta, alpha)
    grad = CASE.pi_f * (cs.lambdas[:, 2] - cs.lambdas[:, 3]) - 2 * alpha * sol0.trajectory.forcing
    t_grid = sol0.trajectory.t_grid
    warm = sol0.trajectory.states[0, [0, 2, 3]]

    rng = np.random.default_rng(41)
    h = 1e-5
    for _ in range(3):
        coeffs = rng.standard_normal(9) / (1.0 + np.arange(9) ** 2)
        delta = np.full(nodes, coeffs[0])
        for k in range(1, 5):
            delta += coeffs[2 * k - 1] * np.cos(k * node_t) + coeffs[2 * k] * np.sin(k * node_t)
        plus, _ = total_cost(base + h * delta, warm)
        minus, _ = total_cost(base - h * delta, warm)
        fd = (plus - minus) / (2 * h)
        delta_grid = SampledForcing(TWO_PI, delta).eval(t_grid)
        analytic = np.trapezoid(grad * delta_grid, t_grid) / TWO_PI
        assert abs(analytic - fd) / abs(fd) < 1e-3


def test_resonant_adjoint_detected():
    # A closed cycle of the undamped frictionless system: Phi is a rotation and
    # the strain penalty feeds it, so (I - Phi) of the full loop is singular when
    # the natural period fits the horizon exactly.
    free = DimensionlessGroups(1.0, 0.0, 0.0)
    sol = solve_state_periodic(free, SinusoidForcing(0.0, 1.0), TWO_PI, 512, guess=np.zeros(3))
    with pytest.raises(ResonantAdjointError):
        solve_costate_periodic(sol, free, beta=0.05)
