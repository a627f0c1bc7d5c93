import numpy as np
import pytest
from scipy.integrate import solve_ivp

from respkern.errors import NonHermitianError, StepTooLargeError
from respkern.propagate import default_dt, epsilon_scaling, evolve_linear_response, richardson_ratio
from respkern.response import Perturbation, kernel_by_conditions, lehmann_convolution, transition_moments
from respkern.symops import one_body_operator_set, site_density_ops

T_GRID = np.linspace(0.0, 10.0, 101)


def test_zero_epsilon_is_static(dimer):
    H, gs = dimer
    ops = site_density_ops(H.space)
    traj = evolve_linear_response(H, gs, Perturbation([1.0, 0.0]), ops, T_GRID, 0.0)
    assert traj.max_abs() < 1e-12 and traj.norm_drift < 1e-12


def test_input_validation(dimer):
    H, gs = dimer
    ops = site_density_ops(H.space)
    pert = Perturbation([1.0, 0.0])
    with pytest.raises(ValueError):
        evolve_linear_response(H, gs, pert, ops, T_GRID, 0.5)
    with pytest.raises(ValueError):
        evolve_linear_response(H, gs, pert, ops, T_GRID[::-1], 1e-3)
    with pytest.raises(ValueError):
        evolve_linear_response(H, gs, pert, ops, T_GRID[1:], 1e-3)


def test_non_hermitian_rejected(dimer):
    H, gs = dimer
    ops = site_density_ops(H.space)
    bad = type(H)("bad", H.matrix + 1e-3j * np.eye(H.dim), space=H.space)
    with pytest.raises(NonHermitianError):
        evolve_linear_response(bad, gs, Perturbation([1.0, 0.0]), ops, T_GRID, 1e-3)


def test_norm_drift_guard(dimer, monkeypatch):
    import respkern.propagate as prop

    H, gs = dimer
    monkeypatch.setattr(prop, "NORM_TOL", -1.0)
    with pytest.raises(StepTooLargeError):
        evolve_linear_response(H, gs, Perturbation([1.0, 0.0]), site_density_ops(H.space), T_GRID, 1e-3)


def test_default_dt_rule(dimer):
    H, _ = dimer
    rho = np.max(np.abs(np.linalg.eigvalsh(H.matrix)))
    assert default_dt(H.matrix, np.zeros_like(H.matrix), 0.0) * rho == pytest.approx(0.05)


def test_matches_ode_solver(dimer):
    # independent oracle: adaptive RK on the full time-dependent Schroedinger equation
    H, gs = dimer
    ops = site_density_ops(H.space)
    pert = Perturbation([1.0, -0.3], "damped_cosine", rate=0.3, frequency=1.5)
    eps = 0.05
    v = ops.combine(pert.weights)
    rhs = lambda t, y: -1j * (H.matrix + eps * float(pert.value(t)) * v) @ y
    sol = solve_ivp(rhs, (0, 5), gs.psi0.astype(complex), t_eval=T_GRID[:51], rtol=1e-11, atol=1e-12)
    q0 = [op.expectation(gs.psi0).real for op in ops]
    ref = np.array([[np.vdot(y, op.matrix @ y).real - q for y in sol.y.T] for op, q in zip(ops, q0)])
    traj = evolve_linear_response(H, gs, pert, ops, T_GRID[:51], eps)
    assert np.max(np.abs(traj.delta_q - ref)) < 1e-5
    assert traj.norm_drift < 1e-9


def test_nonkernel_matches_lehmann(dimer):
    H, gs = dimer
    ops = site_density_ops(H.space)
    pert = Perturbation([1.0, 0.0])
    eps = 1e-4
    traj = evolve_linear_response(H, gs, pert, ops, T_GRID, eps)
    conv = lehmann_convolution(transition_moments(ops, gs), pert, T_GRID)
    assert np.max(np.abs(traj.delta_q / eps - conv)) < 1e-4


def test_kernel_direction_silent(dimer):
    H, gs = dimer
    ops = one_body_operator_set(H.space)
    kern = kernel_by_conditions(ops, gs)
    for w in kern.basis[:3]:
        traj = evolve_linear_response(H, gs, Perturbation(w), ops, T_GRID, 1e-3)
        assert traj.max_abs() < 1e-5


def test_linear_scaling_and_richardson(dimer):
    H, gs = dimer
    ops = site_density_ops(H.space)
    pert = Perturbation([1.0, 0.0])
    rep = epsilon_scaling(H, gs, pert, ops, T_GRID[:41], 1e-3)
    assert rep.ratio == pytest.approx(2.0, abs=1e-3)
    # the dimer density response is odd in eps (site reflection), so the
    # first nonlinearity is cubic and the Richardson ratio is 8
    assert richardson_ratio(H, gs, pert, ops, T_GRID[:41], 1e-2) == pytest.approx(8.0, abs=0.5)
    full = one_body_operator_set(H.space)
    w = np.random.default_rng(3).standard_normal(len(full))
    assert richardson_ratio(H, gs, Perturbation(w), full, T_GRID[:41], 1e-3) == pytest.approx(4.0, abs=0.5)


def test_second_order_response_on_triplet(triplet_m0):
    # S_x keeps the M = 0 triplet inside the ground manifold; the quadrupole responds at O(eps^2)
    from respkern.cli import make_operator_set, build_run_config

    H, gs = triplet_m0
    cfg = build_run_config({"model.kind": "pairing", "model.levels": "0, 0.5", "model.g": "0.2",
                            "model.exchange": "4", "model.electrons": "2", "operators.set": "spin_quadrupole"},
                           "propagate")
    ops = make_operator_set(cfg, H)
    w = np.zeros(len(ops))
    w[ops.labels.index("Sx")] = 1.0
    assert kernel_by_conditions(ops, gs).contains(w)
    rep = epsilon_scaling(H, gs, Perturbation(w), ops, T_GRID, 1e-3)
    assert rep.maxima[0] < 1e-5
    assert 3.5 <= rep.ratio <= 4.5
