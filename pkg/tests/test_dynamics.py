import math

import numpy as np
import pytest

from decaysim.dynamics import (
    TimeGrid,
    Trajectory,
    discrete_bath_oracle,
    fit_decay_rate,
    integrate_mode_system,
    markov_limit,
    markov_trajectory,
    observed_order,
    solve_volterra,
)
from decaysim.exceptions import ContractViolation, HorizonError
from decaysim.runconfig import load_config
from decaysim.spectral import KernelTable, SpectralDensity, build_spectral_density, kernel_table

KBAR = -0.5 + 0.3j


def _constant_solution(n_steps, t_max=2.0):
    grid = TimeGrid(t_max=t_max, n_steps=n_steps)
    return solve_volterra(KernelTable.constant(KBAR, grid.dt, n_steps), grid)


def test_time_grid():
    grid = TimeGrid(t_max=2.0, n_steps=4)
    np.testing.assert_allclose(grid.times, [0.0, 0.5, 1.0, 1.5, 2.0])
    assert grid.refined().n_steps == 8


def test_trajectory_starts_at_one():
    grid = TimeGrid(t_max=1.0, n_steps=2)
    with pytest.raises(ValueError):
        Trajectory(grid=grid, c_values=np.array([0.9, 0.5, 0.1], dtype=complex))


def test_constant_kernel_is_exponential():
    traj = _constant_solution(2000)
    exact = np.exp(KBAR * traj.grid.times)
    assert np.max(np.abs(traj.c_values - exact)) < 1e-4


def test_observed_order_is_second():
    coarse, medium, fine = (_constant_solution(n) for n in (50, 100, 200))
    assert observed_order(coarse, medium, fine) >= 1.9


def test_observed_order_needs_nested_grids():
    with pytest.raises(ContractViolation):
        observed_order(_constant_solution(50), _constant_solution(80), _constant_solution(200))


def test_table_step_must_match_grid():
    grid = TimeGrid(t_max=1.0, n_steps=10)
    with pytest.raises(ContractViolation):
        solve_volterra(KernelTable.constant(KBAR, 0.2, 10), grid)
    with pytest.raises(ContractViolation):
        solve_volterra(KernelTable.constant(KBAR, 0.1, 5), grid)


def test_markov_limit_of_vacuum(vacuum_sd, atom, spec):
    limit = markov_limit(vacuum_sd, atom, spec)
    assert limit.gamma == pytest.approx(atom.gamma0, rel=1e-10)
    assert limit.delta_omega == pytest.approx(-atom.gamma0 * 1.6 / (2 * math.pi), rel=1e-6)
    gamma, delta = limit
    assert gamma == limit.gamma and delta == limit.delta_omega


def test_markov_limit_of_flat_weight(flat_sd, atom, spec):
    limit = markov_limit(flat_sd, atom, spec)
    assert limit.gamma == pytest.approx(atom.gamma0, rel=1e-8)
    assert abs(limit.delta_omega) < 1e-9


def test_markov_trajectory_and_rate_fit():
    grid = TimeGrid(t_max=50.0, n_steps=500)
    traj = markov_trajectory(grid, 0.1, 0.02)
    assert traj.c_values[-1] == pytest.approx(np.exp(-(0.05 + 0.02j) * 50.0))
    assert fit_decay_rate(traj) == pytest.approx(0.1, rel=1e-10)


def test_to_frame_columns():
    grid = TimeGrid(t_max=1.0, n_steps=4)
    frame = markov_trajectory(grid, 1.0, 0.0).to_frame()
    assert list(frame.columns) == ["t", "re_c", "im_c", "population"]
    assert frame["population"].iloc[0] == 1.0


def test_single_mode_rabi_oscillation():
    grid = TimeGrid(t_max=10.0, n_steps=100)
    traj = integrate_mode_system(np.array([0.3]), np.array([0.0]), grid)
    np.testing.assert_allclose(traj.c_values, np.cos(0.3 * grid.times), atol=1e-8)


def test_oracle_arguments(vacuum_sd, atom):
    grid = TimeGrid(t_max=100.0, n_steps=10)
    with pytest.raises(ContractViolation):
        discrete_bath_oracle(vacuum_sd, atom, 50, grid)
    with pytest.raises(HorizonError) as info:
        discrete_bath_oracle(vacuum_sd, atom, 100, TimeGrid(t_max=1000.0, n_steps=10))
    assert info.value.bound == pytest.approx(2 * math.pi / 0.016)


def test_flat_weight_follows_golden_rule(flat_sd, atom):
    grid = TimeGrid(t_max=5.0 / atom.gamma0, n_steps=10000)
    table = kernel_table(flat_sd, atom, grid.dt, grid.n_steps)
    traj = solve_volterra(table, grid)
    exact = np.exp(-0.5 * atom.gamma0 * grid.times)
    relative = np.abs(np.abs(traj.c_values) - exact) / exact
    assert np.max(relative) < 1e-3
    assert fit_decay_rate(traj) == pytest.approx(atom.gamma0, rel=1e-3)


def _oracle_gap(sd, atom):
    grid = TimeGrid(t_max=5.0 / atom.gamma0, n_steps=5000)
    table = kernel_table(sd, atom, grid.dt, grid.n_steps)
    volterra = solve_volterra(table, grid)
    oracle = discrete_bath_oracle(sd, atom, 4000, grid)
    return float(np.max(np.abs(volterra.c_values - oracle.c_values)))


@pytest.mark.slow
def test_oracle_agrees_for_flat_weight(flat_sd, atom):
    assert _oracle_gap(flat_sd, atom) < 5e-3


@pytest.mark.slow
def test_oracle_agrees_for_lorentzian(atom):
    def lorentzian(w):
        return 1.0 + 2.0 * 0.05**2 / ((w - 1.05) ** 2 + 0.05**2)

    sd = SpectralDensity.from_function(lorentzian, (0.2, 1.8))
    assert _oracle_gap(sd, atom) < 5e-3


@pytest.mark.slow
def test_oracle_agrees_at_sphere_band_edge(config_dir):
    cfg = load_config(config_dir / "sphere_bandgap.ini")
    sd = build_spectral_density(
        cfg.geometry,
        cfg.atom,
        cfg.window_bounds,
        cfg.window.n_samples,
        cfg.tolerances,
        cfg.window.refine_tol,
    )
    assert _oracle_gap(sd, cfg.atom) < 5e-3


def test_flat_spectrum_observed_order(flat_sd, atom):
    solutions = []
    for n_steps in (200, 400, 800):
        grid = TimeGrid(t_max=50.0, n_steps=n_steps)
        solutions.append(solve_volterra(kernel_table(flat_sd, atom, grid.dt, n_steps), grid))
    assert observed_order(*solutions) >= 1.9


def test_amplitude_never_grows(atom):
    def lorentzian(w):
        return 1.0 + 2.0 * 0.05**2 / ((w - 1.05) ** 2 + 0.05**2)

    sd = SpectralDensity.from_function(lorentzian, (0.2, 1.8))
    grid = TimeGrid(t_max=5.0 / atom.gamma0, n_steps=2500)
    traj = solve_volterra(kernel_table(sd, atom, grid.dt, grid.n_steps), grid)
    # шаг в единицах 1/Γ₀
    step = atom.gamma0 * grid.dt
    assert np.max(np.abs(traj.c_values)) <= 1.0 + 10.0 * step**2
