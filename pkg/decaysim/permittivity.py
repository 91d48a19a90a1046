"""Модели диэлектрической проницаемости лоренцевского типа и преобразования
Крамерса–Кронига.

Единицы приведённые: c = ħ = ε₀ = 1, все частоты в долях выбранной опорной.
"""

from collections.abc import Sequence
from math import pi, sqrt

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from decaysim.config import settings
from decaysim.exceptions import ContractViolation, ConvergenceError
from decaysim.logger import logger
from decaysim.numerics import (
    QuadratureResult,
    QuadratureSpec,
    default_quadrature,
    integrate_semi_infinite_oscillatory,
    principal_value,
)

# Допуск на отрицательную мнимую часть частоты (шум округления)
_HALF_PLANE_SLACK = 1e-14


class LorentzOscillator(BaseModel):
    """Один лоренцевский резонанс: ω_T, ω_P, γ."""

    model_config = ConfigDict(frozen=True)

    omega_t: float = Field(gt=0, description="поперечная резонансная частота")
    omega_p: float = Field(ge=0, description="плазменная частота (сила связи)")
    gamma: float = Field(gt=0, description="ширина линии поглощения")

    @property
    def omega_l(self) -> float:
        """Продольная частота √(ω_T² + ω_P²), верхний край запрещённой зоны."""
        return longitudinal_frequency(self)


class PermittivityModel(BaseModel):
    """Сумма лоренцевских осцилляторов; пустая модель означает вакуум."""

    model_config = ConfigDict(frozen=True)

    oscillators: tuple[LorentzOscillator, ...] = ()

    @property
    def is_vacuum(self) -> bool:
        return all(osc.omega_p == 0.0 for osc in self.oscillators)

    @property
    def max_omega_t(self) -> float:
        return max((osc.omega_t for osc in self.oscillators), default=0.0)

    def __call__(self, omega):
        return eval_permittivity(self, omega)


def eval_permittivity(model: PermittivityModel, omega):
    """
    Замкнутая форма ε(ω) = 1 + Σ ω_P² / (ω_T² − ω² − iγω).

    Args:
        model: Модель проницаемости
        omega: Частота (скаляр или массив), допускается замкнутая верхняя полуплоскость

    Returns:
        Комплексное ε той же формы, что и omega

    Raises:
        ContractViolation: если Im ω < 0 (вне области голоморфности)
    """
    w = np.asarray(omega, dtype=complex)
    if np.any(w.imag < -_HALF_PLANE_SLACK):
        raise ContractViolation(
            "permittivity is holomorphic only in the closed upper half-plane, "
            f"got Im ω = {float(np.min(w.imag)):.3g}"
        )
    eps = np.ones_like(w)
    for osc in model.oscillators:
        eps = eps + osc.omega_p**2 / (osc.omega_t**2 - w**2 - 1j * osc.gamma * w)
    if np.ndim(omega) == 0:
        return complex(eps)
    return eps


def principal_root(z):
    """Квадратный корень с веткой Im √z ≥ 0."""
    root = np.sqrt(np.asarray(z, dtype=complex))
    root = np.where(root.imag < 0, -root, root)
    if np.ndim(z) == 0:
        return complex(root)
    return root


def refractive_index(model: PermittivityModel, omega):
    """Показатель преломления n = √ε, Im n ≥ 0."""
    return principal_root(eval_permittivity(model, omega))


def longitudinal_frequency(osc: LorentzOscillator) -> float:
    return sqrt(osc.omega_t**2 + osc.omega_p**2)


def band_gap(model: PermittivityModel) -> list[tuple[float, float]]:
    """Полосы (ω_T, ω_L), где ε′ < 0 в пределе γ → 0 (запрещённые зоны)."""
    return [
        (osc.omega_t, longitudinal_frequency(osc))
        for osc in model.oscillators
        if osc.omega_p > 0
    ]


def lorentz_matching(eps_value: complex, omega: float) -> PermittivityModel:
    """
    Один лоренцевский осциллятор, дающий заданное ε на частоте omega.

    Нужен, чтобы сценарии вида «ε(ω_A) = 2 + 1i» строились из того же примитива.

    Raises:
        ContractViolation: если Im ε <= 0 или omega <= 0
    """
    if omega <= 0:
        raise ContractViolation(f"lorentz_matching needs omega > 0, got {omega}")
    z = complex(eps_value) - 1.0
    if z.imag <= 0:
        raise ContractViolation(
            f"a passive Lorentz term needs Im ε > 0, got ε = {complex(eps_value)}"
        )
    scale = 1.0 if omega**2 + z.real > 0 else omega**2 / (2.0 * abs(z.real))
    osc = LorentzOscillator(
        omega_t=sqrt(omega**2 + scale * z.real),
        omega_p=sqrt(scale) * abs(z),
        gamma=scale * z.imag / omega,
    )
    return PermittivityModel(oscillators=(osc,))


def _cutoff(model: PermittivityModel, omega: float) -> float:
    """Граница, после которой остаток интеграла берётся движком хвостов."""
    edge = max(longitudinal_frequency(osc) for osc in model.oscillators)
    width = max(osc.gamma for osc in model.oscillators)
    return 2.0 * max(omega, edge) + 10.0 * width


def _finish(name: str, omega: float, *parts: QuadratureResult) -> float:
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    if not total.converged:
        raise ConvergenceError(f"{name} at ω={omega:.6g} did not converge", total)
    return float(total.value.real)


def kk_real_from_imag(
    model: PermittivityModel, omega: float, spec: QuadratureSpec | None = None
) -> float:
    """
    ε′(ω) − 1 из ε″ по Крамерсу–Кронигу.

    Интеграл по всей оси сворачивается на [0, ∞) с помощью нечётности ε″:
    ε′(ω) − 1 = (2/π) P∫₀^∞ ω′ε″(ω′)/(ω′² − ω²) dω′.
    """
    spec = spec or default_quadrature()
    if omega <= 0:
        raise ContractViolation(f"kk_real_from_imag needs omega > 0, got {omega}")
    if model.is_vacuum:
        return 0.0

    def loss(x: float) -> float:
        return eval_permittivity(model, x).imag

    cutoff = _cutoff(model, omega)
    resonances = [osc.omega_t for osc in model.oscillators]
    core = principal_value(
        lambda x: 2.0 / pi * x * loss(x) / (x + omega),
        omega,
        0.0,
        cutoff,
        spec,
        points=resonances,
    )
    tail = integrate_semi_infinite_oscillatory(
        lambda x: 2.0 / pi * x * loss(x) / (x * x - omega * omega), cutoff, spec
    )
    return _finish("kk_real_from_imag", omega, core, tail)


def kk_imag_from_real(
    model: PermittivityModel, omega: float, spec: QuadratureSpec | None = None
) -> float:
    """
    ε″(ω) из ε′ − 1 по Крамерсу–Кронигу:
    ε″(ω) = −(2ω/π) P∫₀^∞ (ε′(u) − 1)/(u² − ω²) du.
    """
    spec = spec or default_quadrature()
    if omega <= 0:
        raise ContractViolation(f"kk_imag_from_real needs omega > 0, got {omega}")
    if model.is_vacuum:
        return 0.0

    def dispersion(u: float) -> float:
        return eval_permittivity(model, u).real - 1.0

    cutoff = _cutoff(model, omega)
    resonances = [osc.omega_t for osc in model.oscillators]
    core = principal_value(
        lambda u: -2.0 * omega / pi * dispersion(u) / (u + omega),
        omega,
        0.0,
        cutoff,
        spec,
        points=resonances,
    )
    tail = integrate_semi_infinite_oscillatory(
        lambda u: -2.0 * omega / pi * dispersion(u) / (u * u - omega * omega),
        cutoff,
        spec,
    )
    return _finish("kk_imag_from_real", omega, core, tail)


def _residual_at(
    model: PermittivityModel, omega: float, spec: QuadratureSpec
) -> tuple[float, float]:
    eps = eval_permittivity(model, omega)
    real_kk = 1.0 + kk_real_from_imag(model, omega, spec)
    imag_kk = kk_imag_from_real(model, omega, spec)
    return abs(real_kk - eps.real), abs(imag_kk - eps.imag)


def kk_residuals(
    model: PermittivityModel,
    omega_grid: Sequence[float],
    spec: QuadratureSpec | None = None,
    n_jobs: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Поточечные невязки |ε′_KK − ε′| и |ε″_KK − ε″| на сетке.

    Точки сетки независимы и считаются параллельно (joblib).
    """
    spec = spec or default_quadrature()
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size == 0 or model.is_vacuum:
        return np.zeros(grid.size), np.zeros(grid.size)
    if np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise ContractViolation("kk_residual needs a strictly ascending positive grid")

    logger.info("🔁 Проверка Крамерса–Кронига на %d частотах", grid.size)
    residuals = Parallel(n_jobs=n_jobs or settings.N_JOBS)(
        delayed(_residual_at)(model, float(w), spec) for w in grid
    )
    return np.array([r[0] for r in residuals]), np.array([r[1] for r in residuals])


def kk_residual(
    model: PermittivityModel,
    omega_grid: Sequence[float],
    spec: QuadratureSpec | None = None,
    n_jobs: int | None = None,
) -> tuple[float, float]:
    """Сертификат согласованности: максимумы невязок ККР по сетке."""
    real_res, imag_res = kk_residuals(model, omega_grid, spec, n_jobs)
    if real_res.size == 0:
        return 0.0, 0.0
    real_max, imag_max = float(real_res.max()), float(imag_res.max())
    logger.info("✅ Невязки ККР: ε′ %.3g, ε″ %.3g", real_max, imag_max)
    return real_max, imag_max
