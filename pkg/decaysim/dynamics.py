"""
Динамика амплитуды верхнего уровня C_u(t).

Интегральное уравнение C(t) = 1 + ∫₀ᵗ K̄(t − t′)·C(t′) dt′ решается
маршем по времени с трапециевидными весами, рядом лежат марковский предел
и независимая проверка через дискретный резервуар мод.
"""

from math import ceil, log2, pi, sqrt
from typing import NamedTuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from decaysim.exceptions import ContractViolation, ConvergenceError, HorizonError
from decaysim.logger import logger
from decaysim.numerics import QuadratureSpec, default_quadrature, principal_value
from decaysim.spectral import AtomConfig, KernelTable, SpectralDensity

# Шаг RK4 выбирается так, чтобы h·λ_max не превышало этого числа
_RK4_STABILITY = 0.1


class TimeGrid(BaseModel):
    """Равномерная сетка t_n = n·dt, n = 0..n_steps."""

    model_config = ConfigDict(frozen=True)

    t_max: float = Field(gt=0)
    n_steps: int = Field(ge=2)

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(t_max=self.t_max, n_steps=self.n_steps * factor)


class Trajectory(BaseModel):
    """Отсчёты C_u(t_n) на сетке."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    c_values: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> "Trajectory":
        if self.c_values.shape != (self.grid.n_steps + 1,):
            raise ValueError(
                f"expected {self.grid.n_steps + 1} samples, got shape {self.c_values.shape}"
            )
        if abs(self.c_values[0] - 1.0) > 1e-12:
            raise ValueError(f"C_u(0) must be 1, got {self.c_values[0]}")
        return self

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.c_values) ** 2

    def to_frame(self) -> pd.DataFrame:
        """Таблица t, Re C, Im C, |C|²."""
        return pd.DataFrame(
            {
                "t": self.grid.times,
                "re_c": self.c_values.real,
                "im_c": self.c_values.imag,
                "population": self.population,
            }
        )


def solve_volterra(kt: KernelTable, grid: TimeGrid) -> Trajectory:
    """
    Марш с трапециевидными весами:
    C_n = (1 + dt·[½K̄_n·C_0 + Σ_{m=1}^{n−1} K̄_{n−m}·C_m]) / (1 − ½dt·K̄_0).

    При K̄(0) = 0 знаменатель равен 1 и схема явная.

    Raises:
        ContractViolation: шаг таблицы не совпадает с шагом сетки или таблица короче горизонта
    """
    dt = grid.dt
    if abs(kt.dt - dt) > 1e-12 * dt:
        raise ContractViolation(f"kernel table step {kt.dt:.6g} differs from grid step {dt:.6g}")
    if kt.k_values.size < grid.n_steps + 1:
        raise ContractViolation(
            f"kernel table has {kt.k_values.size} entries, grid needs {grid.n_steps + 1}"
        )

    kernel = np.asarray(kt.k_values[: grid.n_steps + 1], dtype=complex)
    c = np.empty(grid.n_steps + 1, dtype=complex)
    c[0] = 1.0
    diagonal = 1.0 - 0.5 * dt * kernel[0]
    logger.info("⏱️ Решение интегрального уравнения: %d шагов, dt = %.4g", grid.n_steps, dt)
    for n in range(1, grid.n_steps + 1):
        history = np.dot(kernel[n - 1 : 0 : -1], c[1:n]) if n > 1 else 0.0
        c[n] = (1.0 + dt * (0.5 * kernel[n] * c[0] + history)) / diagonal
    return Trajectory(grid=grid, c_values=c)


class MarkovLimit(NamedTuple):
    """Скорость распада и сдвиг линии в марковском пределе."""

    gamma: float
    delta_omega: float


def markov_limit(
    sd: SpectralDensity, atom: AtomConfig, spec: QuadratureSpec | None = None
) -> MarkovLimit:
    """
    Γ = 2π·J(ω_A) = Γ₀·S(ω_A), δω = −P∫ J(ω)/(ω − ω_A) dω по окну.

    С этим знаком C_u(t) = e^{−(Γ/2 + iδω)t}.
    """
    spec = spec or default_quadrature()
    if not sd.contains(atom.omega_a):
        raise ContractViolation(f"window {sd.window} does not contain ω_A = {atom.omega_a}")
    low, high = sd.window
    gamma = 2.0 * pi * float(sd.weight(atom.omega_a, atom))
    shift = principal_value(
        lambda w: float(sd.weight(w, atom)), atom.omega_a, low, high, spec
    )
    if not shift.converged:
        raise ConvergenceError("Markov line-shift integral did not converge", shift)
    return MarkovLimit(gamma=gamma, delta_omega=-float(shift.value.real))


def markov_trajectory(grid: TimeGrid, gamma: float, delta_omega: float) -> Trajectory:
    """C_u(t) = e^{−(Γ/2 + iδω)t}."""
    times = grid.times
    return Trajectory(grid=grid, c_values=np.exp(-(0.5 * gamma + 1j * delta_omega) * times))


def integrate_mode_system(
    couplings: np.ndarray, detunings: np.ndarray, grid: TimeGrid
) -> Trajectory:
    """
    RK4 для одновозбуждённой системы во вращающейся системе отсчёта:
    ċ = −Σ g_k β_k, β̇_k = g_k c + iδ_k β_k, c(0) = 1, β(0) = 0.

    Шаг сетки дробится на подшаги, чтобы h·λ_max ≤ 0.1.
    """
    g = np.asarray(couplings, dtype=float)
    delta = np.asarray(detunings, dtype=float)
    spectral_radius = float(np.max(np.abs(delta), initial=0.0)) + 2.0 * sqrt(float(g @ g))
    substeps = max(1, ceil(grid.dt * spectral_radius / _RK4_STABILITY))
    h = grid.dt / substeps

    def rhs(c: complex, beta: np.ndarray) -> tuple[complex, np.ndarray]:
        return -np.dot(g, beta), g * c + 1j * delta * beta

    c = 1.0 + 0j
    beta = np.zeros(g.size, dtype=complex)
    out = np.empty(grid.n_steps + 1, dtype=complex)
    out[0] = c
    for n in range(1, grid.n_steps + 1):
        for _ in range(substeps):
            k1c, k1b = rhs(c, beta)
            k2c, k2b = rhs(c + 0.5 * h * k1c, beta + 0.5 * h * k1b)
            k3c, k3b = rhs(c + 0.5 * h * k2c, beta + 0.5 * h * k2b)
            k4c, k4b = rhs(c + h * k3c, beta + h * k3b)
            c = c + h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
            beta = beta + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        out[n] = c
    return Trajectory(grid=grid, c_values=out)


def discrete_bath_oracle(
    sd: SpectralDensity, atom: AtomConfig, n_modes: int, grid: TimeGrid
) -> Trajectory:
    """
    Та же динамика через конечный набор мод резервуара.

    Окно режется на n_modes равных ячеек, моды в серединах ячеек,
    g_k² = J(ω_k)·Δω. Результат осмыслен до времени возврата 2π/Δω.

    Raises:
        ContractViolation: n_modes < 100
        HorizonError: t_max не меньше времени возврата
    """
    if n_modes < 100:
        raise ContractViolation(f"discrete bath needs n_modes >= 100, got {n_modes}")
    low, high = sd.window
    spacing = (high - low) / n_modes
    bound = 2.0 * pi / spacing
    if grid.t_max >= bound:
        raise HorizonError(grid.t_max, bound)
    omegas = low + (np.arange(n_modes) + 0.5) * spacing
    couplings = np.sqrt(np.clip(sd.weight(omegas, atom), 0.0, None) * spacing)
    logger.info("🎛️ Дискретный резервуар: %d мод, горизонт %.4g < %.4g", n_modes, grid.t_max, bound)
    return integrate_mode_system(couplings, atom.omega_a - omegas, grid)


def fit_decay_rate(traj: Trajectory, start_fraction: float = 0.1) -> float:
    """
    Скорость распада населённости: МНК-наклон ln|C_u|² по t.

    Начальный отрезок (start_fraction горизонта) пропускается.
    """
    times = traj.grid.times
    population = traj.population
    mask = (times >= start_fraction * traj.grid.t_max) & (population > 1e-300)
    if np.count_nonzero(mask) < 2:
        raise ContractViolation("not enough positive population samples to fit a rate")
    slope, _ = np.polyfit(times[mask], np.log(population[mask]), 1)
    return float(-slope)


def observed_order(coarse: Trajectory, medium: Trajectory, fine: Trajectory) -> float:
    """
    Порядок самосходимости по трём решениям с шагами dt, dt/2, dt/4:
    p = log₂(‖C_dt − C_dt/2‖ / ‖C_dt/2 − C_dt/4‖) на узлах грубой сетки.
    """
    n = coarse.grid.n_steps
    if medium.grid.n_steps != 2 * n or fine.grid.n_steps != 4 * n:
        raise ContractViolation("observed_order needs grids with n, 2n and 4n steps")
    first = np.max(np.abs(coarse.c_values - medium.c_values[::2]))
    second = np.max(np.abs(medium.c_values[::2] - fine.c_values[::4]))
    if second == 0.0:
        raise ContractViolation("fine and medium solutions coincide; order is undefined")
    return float(log2(first / second))
