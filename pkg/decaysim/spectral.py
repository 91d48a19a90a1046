"""
Спектральная плотность S(ω), ядро памяти K̄(τ) и фактор Парселла.

S(ω) = 6π·μ̂·Im G(r_A, r_A, ω)·μ̂ / ω нормирована так, что в вакууме S ≡ 1.
Вес ядра J(ω) = Γ₀·ω·S(ω) / (2π·ω_A), ядро
K̄(τ) = ∫ dω J(ω)·[e^{−i(ω−ω_A)τ} − 1] / (i(ω − ω_A)) по окну [ω_min, ω_max].

Частоты за пределами окна не учитываются: вклад плоского хвоста S ≈ 1
(вакуумный лэмбовский сдвиг) считается включённым в ω_A.
"""

from collections.abc import Callable, Sequence
from functools import cached_property
from math import pi

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.interpolate import CubicSpline
from scipy.special import sici

from decaysim.config import settings
from decaysim.exceptions import ContractViolation, ConvergenceError
from decaysim.greens import Geometry, im_green_at_atom
from decaysim.logger import logger
from decaysim.numerics import QuadratureSpec, default_quadrature, integrate_adaptive

# Минимальное число узлов сетки Филона для остатка ядра
_FILON_MIN_POINTS = 8193
# Сколько комплексных чисел держать в памяти при векторизации по τ
_FILON_BLOCK = 4_000_000
# Порог |φ|, ниже которого моменты Филона считаются рядом
_FILON_SERIES = 0.1
# Порог аргумента, ниже которого Cin(x) считается рядом
_CIN_SERIES = 0.5
# Сколько значений τ участвует в подборе сетки Филона
_FILON_TEST_TAUS = 8


class AtomConfig(BaseModel):
    """Двухуровневый атом: частота перехода, направление диполя, вакуумная скорость."""

    model_config = ConfigDict(frozen=True)

    omega_a: float = Field(gt=0, description="частота перехода ω_A")
    dipole_dir: tuple[float, float, float] = (0.0, 0.0, 1.0)
    gamma0: float = Field(gt=0, description="вакуумная скорость распада Γ₀")

    @field_validator("dipole_dir")
    @classmethod
    def _normalize(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        norm = float(np.linalg.norm(value))
        if norm == 0.0:
            raise ValueError("dipole direction must be non-zero")
        if abs(norm - 1.0) <= 1e-14:
            return tuple(float(c) for c in value)
        return tuple(float(c) / norm for c in value)

    @property
    def dipole(self) -> np.ndarray:
        return np.asarray(self.dipole_dir, dtype=float)


class SpectralDensity(BaseModel):
    """Таблица S(ω) на возрастающей сетке внутри окна; между узлами кубический сплайн."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega_grid: np.ndarray
    s_values: np.ndarray
    window: tuple[float, float]

    @model_validator(mode="after")
    def _check(self) -> "SpectralDensity":
        grid, values = self.omega_grid, self.s_values
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 4:
            raise ValueError("omega_grid and s_values must be 1-D arrays of equal length >= 4")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("omega_grid must be strictly ascending")
        low, high = self.window
        if not (0 < low <= grid[0] and grid[-1] <= high):
            raise ValueError(f"grid [{grid[0]}, {grid[-1]}] must lie inside window {self.window}")
        if np.any(values < 0):
            raise ValueError(f"spectral density must be non-negative, min S = {values.min():.3g}")
        return self

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        window: tuple[float, float],
        n_samples: int = 4097,
    ) -> "SpectralDensity":
        """Табуляция аналитического спектра (плоского, лоренцевского) на равномерной сетке."""
        grid = np.linspace(window[0], window[1], n_samples)
        values = np.asarray(fn(grid), dtype=float) * np.ones_like(grid)
        return cls(omega_grid=grid, s_values=values, window=(float(window[0]), float(window[1])))

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.omega_grid, self.s_values)

    def s_at(self, omega):
        """S(ω) по сплайну."""
        return self.spline(omega)

    def weight(self, omega, atom: AtomConfig):
        """J(ω) = Γ₀·ω·S(ω) / (2π·ω_A)."""
        return atom.gamma0 * omega * self.s_at(omega) / (2.0 * pi * atom.omega_a)

    def contains(self, omega: float) -> bool:
        return self.window[0] < omega < self.window[1]


class KernelTable(BaseModel):
    """Значения K̄(τ) на равномерной сетке τ_n = n·dt."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau_grid: np.ndarray
    k_values: np.ndarray
    dt: float = Field(gt=0)
    window: tuple[float, float]

    @classmethod
    def constant(cls, value: complex, dt: float, n_steps: int) -> "KernelTable":
        """Синтетическая таблица с постоянным ядром (тест решателя)."""
        taus = dt * np.arange(n_steps + 1)
        return cls(
            tau_grid=taus,
            k_values=np.full(taus.shape, complex(value)),
            dt=dt,
            window=(0.0, 0.0),
        )


def spectral_value(geometry: Geometry, atom: AtomConfig, omega: float, spec: QuadratureSpec) -> float:
    """S(ω) = 6π·μ̂·Im G·μ̂/ω в одной точке."""
    im_g = im_green_at_atom(geometry, omega, spec)
    mu = atom.dipole
    return float(6.0 * pi * mu @ im_g @ mu / omega)


def _sample(
    geometry: Geometry,
    atom: AtomConfig,
    omegas: np.ndarray,
    spec: QuadratureSpec,
    n_jobs: int,
) -> np.ndarray:
    values = Parallel(n_jobs=n_jobs)(
        delayed(spectral_value)(geometry, atom, float(w), spec) for w in omegas
    )
    return np.asarray(values, dtype=float)


def _check_window(window: Sequence[float], omega_a: float) -> tuple[float, float]:
    low, high = float(window[0]), float(window[1])
    if not 0 < low < omega_a < high:
        raise ContractViolation(
            f"window must satisfy 0 < ω_min < ω_A < ω_max, got [{low}, {high}] with ω_A = {omega_a}"
        )
    return low, high


def build_spectral_density(
    geometry: Geometry,
    atom: AtomConfig,
    window: Sequence[float],
    n_samples: int = 257,
    spec: QuadratureSpec | None = None,
    refine_tol: float | None = None,
    n_jobs: int | None = None,
) -> SpectralDensity:
    """
    Табулирует S(ω) на окне с удвоением сетки.

    На каждом проходе считаются середины интервалов и сравниваются с
    предсказанием сплайна по текущей сетке. Сетка принимается, когда
    ошибка интерполяции не превышает refine_tol·max S (по умолчанию
    SPECTRUM_REFINE_TOL из настроек). Если следующее удвоение превысило бы
    MAX_SPECTRUM_SAMPLES, уточнение останавливается с предупреждением.

    Raises:
        ContractViolation: окно не содержит ω_A или n_samples < 16
        GeometryError: атом в поглотителе
    """
    spec = spec or default_quadrature()
    low, high = _check_window(window, atom.omega_a)
    if n_samples < 16:
        raise ContractViolation(f"n_samples must be >= 16, got {n_samples}")
    tol = refine_tol if refine_tol is not None else settings.SPECTRUM_REFINE_TOL
    jobs = n_jobs or settings.N_JOBS

    grid = np.linspace(low, high, n_samples)
    values = _sample(geometry, atom, grid, spec, jobs)
    logger.info("📈 Спектральная плотность: %d узлов на [%.4g, %.4g]", grid.size, low, high)

    while True:
        if 2 * grid.size - 1 > settings.MAX_SPECTRUM_SAMPLES:
            logger.warning(
                "⚠️ Уточнение сетки остановлено на %d узлах (лимит %d)",
                grid.size,
                settings.MAX_SPECTRUM_SAMPLES,
            )
            break
        midpoints = 0.5 * (grid[:-1] + grid[1:])
        predicted = CubicSpline(grid, values)(midpoints)
        computed = _sample(geometry, atom, midpoints, spec, jobs)
        merged_grid = np.empty(2 * grid.size - 1)
        merged_grid[0::2], merged_grid[1::2] = grid, midpoints
        merged_values = np.empty_like(merged_grid)
        merged_values[0::2], merged_values[1::2] = values, computed
        error = float(np.max(np.abs(predicted - computed)))
        scale = max(float(np.max(np.abs(merged_values))), spec.abs_tol)
        grid, values = merged_grid, merged_values
        logger.debug("🔍 Уточнение: %d узлов, ошибка сплайна %.3g", grid.size, error)
        if error <= tol * scale:
            break

    negative = values < 0
    if np.any(negative):
        # Округление вокруг нулевой плотности в запрещённой зоне
        floor = float(values.min())
        if floor < -1e-9 * max(1.0, float(values.max())):
            raise ConvergenceError(f"spectral density came out negative (min S = {floor:.3g})")
        values = np.where(negative, 0.0, values)
    logger.info("✅ Спектральная плотность готова: %d узлов", grid.size)
    return SpectralDensity(omega_grid=grid, s_values=values, window=(low, high))


def purcell_factor(geometry: Geometry, atom: AtomConfig, spec: QuadratureSpec | None = None) -> float:
    """Γ/Γ₀ = S(ω_A)."""
    return spectral_value(geometry, atom, atom.omega_a, spec or default_quadrature())


def _switch(atom: AtomConfig) -> float:
    return settings.DELTA_SWITCH * atom.omega_a


def kernel_integrand(sd: SpectralDensity, atom: AtomConfig, omega: float, tau: float) -> complex:
    """
    J(ω)·[e^{−iΔτ} − 1]/(iΔ), Δ = ω − ω_A.

    При |Δ| < δ_switch·ω_A скобка заменяется рядом −τ + iτ²Δ/2.
    """
    delta = omega - atom.omega_a
    weight = float(sd.weight(omega, atom))
    if abs(delta) < _switch(atom):
        return complex(weight * (-tau + 0.5j * tau * tau * delta))
    return complex(weight * (np.exp(-1j * delta * tau) - 1.0) / (1j * delta))


def _cin(x: np.ndarray) -> np.ndarray:
    """Cin(x) = ∫₀^x (1 − cos t)/t dt = γ + ln x − Ci(x)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    small = x < _CIN_SERIES
    xs = x[small]
    term = np.ones_like(xs)
    acc = np.zeros_like(xs)
    for k in range(1, 9):
        term = term * (-(xs**2)) / ((2 * k - 1) * (2 * k))
        acc -= term / (2 * k)
    out[small] = acc
    large = ~small
    if np.any(large):
        _, ci = sici(x[large])
        out[large] = np.euler_gamma + np.log(x[large]) - ci
    return out


def flat_window_kernel(taus: np.ndarray, low: float, high: float, omega_a: float) -> np.ndarray:
    """
    Φ(τ) = ∫ (e^{−iΔτ} − 1)/(iΔ) dΔ по Δ ∈ [ω_min − ω_A, ω_max − ω_A].

    Φ = −[Si(bτ) + Si(|a|τ)] + i[Cin(bτ) − Cin(|a|τ)].
    """
    taus = np.asarray(taus, dtype=float)
    a = omega_a - low
    b = high - omega_a
    si_b, _ = sici(b * taus)
    si_a, _ = sici(a * taus)
    return -(si_b + si_a) + 1j * (_cin(b * taus) - _cin(a * taus))


def _filon_moments(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """I0 = ∫₀¹ e^{iφt} dt и I1 = ∫₀¹ t·e^{iφt} dt."""
    phi = np.asarray(phi, dtype=float)
    i0 = np.empty(phi.shape, dtype=complex)
    i1 = np.empty(phi.shape, dtype=complex)
    small = np.abs(phi) < _FILON_SERIES
    ps = phi[small]
    power = np.ones(ps.shape, dtype=complex)
    s0 = np.zeros(ps.shape, dtype=complex)
    s1 = np.zeros(ps.shape, dtype=complex)
    factorial = 1.0
    for n in range(10):
        if n > 0:
            power = power * (1j * ps)
            factorial *= n
        s0 += power / (factorial * (n + 1))
        s1 += power / (factorial * (n + 2))
    i0[small], i1[small] = s0, s1
    pl = phi[~small]
    e = np.exp(1j * pl)
    i0[~small] = (e - 1.0) / (1j * pl)
    i1[~small] = e / (1j * pl) + (e - 1.0) / pl**2
    return i0, i1


def _remainder_samples(sd: SpectralDensity, atom: AtomConfig, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Узлы Δ_j и гладкий остаток h = (J − J(ω_A))/(iΔ) на равномерной сетке окна."""
    low, high = sd.window
    omegas = np.linspace(low, high, n_points)
    deltas = omegas - atom.omega_a
    j_values = sd.weight(omegas, atom)
    j_a = float(sd.weight(atom.omega_a, atom))
    spline = sd.spline
    scale = atom.gamma0 / (2.0 * pi * atom.omega_a)
    # dJ/dω и d²J/dω² в ω_A для ряда возле устранимой особенности
    s_a, ds_a, d2s_a = spline(atom.omega_a), spline(atom.omega_a, 1), spline(atom.omega_a, 2)
    dj = scale * (s_a + atom.omega_a * ds_a)
    d2j = scale * (2.0 * ds_a + atom.omega_a * d2s_a)
    near = np.abs(deltas) < _switch(atom)
    h = np.empty(omegas.shape, dtype=complex)
    h[~near] = (j_values[~near] - j_a) / (1j * deltas[~near])
    h[near] = (dj + 0.5 * d2j * deltas[near]) / 1j
    return deltas, h


def _filon_points(sd: SpectralDensity) -> int:
    low, high = sd.window
    step = float(np.min(np.diff(sd.omega_grid))) / 4.0
    n = max(_FILON_MIN_POINTS, int(np.ceil((high - low) / step)) + 1)
    # нечётное число узлов: сетка вдвое грубее вложена в неё
    return n if n % 2 == 1 else n + 1


def _kernel_values(
    sd: SpectralDensity, atom: AtomConfig, taus: np.ndarray, n_points: int
) -> np.ndarray:
    """Векторизованный K̄(τ): аналитическая часть плоского окна плюс остаток по Филону на n_points узлах."""
    low, high = sd.window
    if not sd.contains(atom.omega_a):
        raise ContractViolation(f"window {sd.window} does not contain ω_A = {atom.omega_a}")
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0):
        raise ContractViolation("kernel needs tau >= 0")

    j_a = float(sd.weight(atom.omega_a, atom))
    flat = j_a * flat_window_kernel(taus, low, high, atom.omega_a)

    deltas, h = _remainder_samples(sd, atom, n_points)
    eta = deltas[1] - deltas[0]
    trapezoid = eta * (np.sum(h) - 0.5 * (h[0] + h[-1]))
    i0, i1 = _filon_moments(-taus * eta)
    left_weight = (i0 - i1)[:, None]
    right_weight = i1[:, None]

    remainder = np.empty(taus.shape, dtype=complex)
    block = max(1, _FILON_BLOCK // deltas.size)
    for start in range(0, taus.size, block):
        stop = min(start + block, taus.size)
        phases = np.exp(-1j * np.outer(taus[start:stop], deltas[:-1]))
        panels = phases * (left_weight[start:stop] * h[:-1] + right_weight[start:stop] * h[1:])
        remainder[start:stop] = eta * np.sum(panels, axis=1) - trapezoid

    values = flat + remainder
    values[taus == 0.0] = 0.0
    return values


def filon_resolution(
    sd: SpectralDensity,
    atom: AtomConfig,
    taus: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> int:
    """
    Число узлов сетки Филона, при котором остаток ядра укладывается в допуск.

    На нескольких τ из taus сравниваются сетки из n и (n + 1)/2 узлов;
    правило второго порядка, поэтому ошибка оценивается как разность / 3.
    Пока оценка больше spec.tolerance(max|K̄|), сетка удваивается; на
    FILON_MAX_POINTS подбор останавливается с предупреждением.
    """
    spec = spec or default_quadrature()
    n = _filon_points(sd)
    cap = max(n, settings.FILON_MAX_POINTS)
    positive = np.asarray(taus, dtype=float)
    positive = positive[positive > 0]
    if positive.size == 0:
        return n
    picks = np.unique(np.linspace(0, positive.size - 1, min(positive.size, _FILON_TEST_TAUS)).astype(int))
    sample = positive[picks]

    coarse = _kernel_values(sd, atom, sample, (n + 1) // 2)
    fine = _kernel_values(sd, atom, sample, n)
    while True:
        error = float(np.max(np.abs(fine - coarse))) / 3.0
        allowed = spec.tolerance(float(np.max(np.abs(fine))))
        if error <= allowed:
            logger.debug("🔍 Сетка Филона: %d узлов, оценка ошибки %.3g", n, error)
            return n
        if 2 * n - 1 > cap:
            logger.warning(
                "⚠️ Сетка Филона ограничена %d узлами: оценка ошибки ядра %.3g при допуске %.3g",
                n,
                error,
                allowed,
            )
            return n
        n = 2 * n - 1
        coarse, fine = fine, _kernel_values(sd, atom, sample, n)


def kernel_eval(
    sd: SpectralDensity,
    atom: AtomConfig,
    tau: float,
    spec: QuadratureSpec | None = None,
) -> complex:
    """K̄(τ) в одной точке тем же путём, что и kernel_table."""
    taus = np.array([float(tau)])
    n_points = filon_resolution(sd, atom, taus, spec)
    return complex(_kernel_values(sd, atom, taus, n_points)[0])


def kernel_eval_quadrature(
    sd: SpectralDensity,
    atom: AtomConfig,
    tau: float,
    spec: QuadratureSpec | None = None,
) -> complex:
    """Прямая адаптивная квадратура kernel_integrand: независимая проверка kernel_eval."""
    spec = spec or default_quadrature()
    if not sd.contains(atom.omega_a):
        raise ContractViolation(f"window {sd.window} does not contain ω_A = {atom.omega_a}")
    low, high = sd.window
    result = integrate_adaptive(
        lambda w: kernel_integrand(sd, atom, w, tau), low, high, spec, points=[atom.omega_a]
    )
    if not result.converged:
        raise ConvergenceError(f"kernel quadrature at τ={tau:.6g} did not converge", result)
    return complex(result.value)


def kernel_table(
    sd: SpectralDensity,
    atom: AtomConfig,
    dt: float,
    n_steps: int,
    spec: QuadratureSpec | None = None,
    n_jobs: int | None = None,
) -> KernelTable:
    """K̄ на {0, dt, …, n_steps·dt}; блоки τ независимы и считаются параллельно."""
    if dt <= 0:
        raise ContractViolation(f"kernel_table needs dt > 0, got {dt}")
    if n_steps < 1:
        raise ContractViolation(f"kernel_table needs n_steps >= 1, got {n_steps}")
    taus = dt * np.arange(n_steps + 1)
    jobs = n_jobs or settings.N_JOBS
    n_points = filon_resolution(sd, atom, taus, spec)
    logger.info("🧮 Таблица ядра: %d значений τ, dt = %.4g, %d узлов Филона", taus.size, dt, n_points)
    if jobs == 1:
        values = _kernel_values(sd, atom, taus, n_points)
    else:
        chunks = np.array_split(taus, jobs)
        parts = Parallel(n_jobs=jobs)(
            delayed(_kernel_values)(sd, atom, chunk, n_points) for chunk in chunks
        )
        values = np.concatenate(parts)
    return KernelTable(tau_grid=taus, k_values=values, dt=dt, window=sd.window)


class WindowDiagnostic(BaseModel):
    """Чувствительность ядра к удвоению окна."""

    model_config = ConfigDict(frozen=True)

    max_deviation: float
    tolerance: float
    consistent: bool


def window_diagnostic(
    geometry: Geometry,
    atom: AtomConfig,
    window: Sequence[float],
    taus: Sequence[float],
    n_samples: int = 257,
    tolerance: float = 1e-3,
    spec: QuadratureSpec | None = None,
    refine_tol: float | None = None,
) -> WindowDiagnostic:
    """
    Сравнивает K̄(τ) на окне и на окне вдвое шире вокруг ω_A.

    Это диагностика: превышение допуска пишется в лог, но не считается ошибкой.
    Отклонение нормировано на Γ₀.
    """
    low, high = _check_window(window, atom.omega_a)
    wide_low = max(atom.omega_a - 2.0 * (atom.omega_a - low), 0.5 * low)
    wide_high = atom.omega_a + 2.0 * (high - atom.omega_a)
    taus = np.asarray(taus, dtype=float)

    narrow = build_spectral_density(geometry, atom, (low, high), n_samples, spec, refine_tol)
    wide = build_spectral_density(
        geometry, atom, (wide_low, wide_high), n_samples, spec, refine_tol
    )
    k_narrow = _kernel_values(narrow, atom, taus, filon_resolution(narrow, atom, taus, spec))
    k_wide = _kernel_values(wide, atom, taus, filon_resolution(wide, atom, taus, spec))
    deviation = float(np.max(np.abs(k_narrow - k_wide)) / atom.gamma0)
    consistent = deviation <= tolerance
    if not consistent:
        logger.warning(
            "⚠️ Ядро чувствительно к окну: отклонение %.3g·Γ₀ при допуске %.3g", deviation, tolerance
        )
    return WindowDiagnostic(max_deviation=deviation, tolerance=tolerance, consistent=consistent)
