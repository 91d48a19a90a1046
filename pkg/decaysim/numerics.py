"""Квадратурные движки: адаптивный на конечном отрезке, главное значение,
осцилляторный на полубесконечном интервале и интеграл Фурье на отрезке.

Все функции чистые: состояние не разделяется между вызовами, поэтому их можно
вызывать параллельно из нескольких воркеров.
"""

from collections.abc import Callable, Sequence
from math import isfinite, log

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from decaysim.config import settings
from decaysim.exceptions import ContractViolation, IntegrandError
from decaysim.logger import logger

Integrand = Callable[[float], complex]

# Сколько последних частичных сумм отдаётся ε-алгоритму Винна
_EPSILON_WINDOW = 14


class QuadratureSpec(BaseModel):
    """Допуски и бюджет квадратуры."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-8, gt=0)
    abs_tol: float = Field(default=1e-12, ge=0)
    max_subdivisions: int = Field(default=500, ge=1)
    oscillation_period_hint: float | None = Field(default=None, gt=0)

    def tolerance(self, value: complex) -> float:
        """Допустимая абсолютная ошибка для результата ``value``."""
        return max(self.abs_tol, self.rel_tol * abs(value))

    def with_period(self, period: float | None) -> "QuadratureSpec":
        """Копия спецификации с другой подсказкой периода осцилляций."""
        return self.model_copy(update={"oscillation_period_hint": period})


class QuadratureResult(BaseModel):
    """Результат квадратуры с оценкой ошибки."""

    model_config = ConfigDict(frozen=True)

    value: complex
    error_estimate: float = Field(ge=0)
    evaluations: int = Field(ge=0)
    converged: bool

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: complex, shift: complex = 0.0) -> "QuadratureResult":
        """Результат для ``factor * I + shift`` (ошибка масштабируется по модулю)."""
        return QuadratureResult(
            value=factor * self.value + shift,
            error_estimate=abs(factor) * self.error_estimate,
            evaluations=self.evaluations,
            converged=self.converged,
        )


def default_quadrature() -> QuadratureSpec:
    """Спецификация квадратуры по умолчанию из настроек приложения."""
    return QuadratureSpec(
        rel_tol=settings.REL_TOL,
        abs_tol=settings.ABS_TOL,
        max_subdivisions=settings.MAX_SUBDIVISIONS,
    )


def _guarded(f: Integrand) -> Callable[[float], complex]:
    """Оборачивает подынтегральную функцию проверкой на NaN/inf."""

    def wrapper(x: float) -> complex:
        value = complex(f(x))
        if not (isfinite(value.real) and isfinite(value.imag)):
            raise IntegrandError(float(x), value)
        return value

    return wrapper


def integrate_adaptive(
    f: Integrand,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
) -> QuadratureResult:
    """
    Адаптивная квадратура Гаусса–Кронрода комплексной функции на [a, b].

    Args:
        f: Подынтегральная функция одной вещественной переменной
        a: Нижний предел
        b: Верхний предел (a < b)
        spec: Допуски; по умолчанию из настроек
        points: Точки разрыва производных внутри (a, b), где интервал делится заранее

    Returns:
        QuadratureResult; converged=False, если бюджет разбиений исчерпан

    Raises:
        ContractViolation: если a >= b
        IntegrandError: если f вернула NaN/inf
    """
    spec = spec or default_quadrature()
    if not a < b:
        raise ContractViolation(f"integrate_adaptive needs a < b, got [{a}, {b}]")

    guarded = _guarded(f)

    def as_vector(x: float) -> np.ndarray:
        value = guarded(x)
        return np.array([value.real, value.imag])

    breaks = None
    if points:
        breaks = sorted(p for p in points if a < p < b)

    result, error, info = integrate.quad_vec(
        as_vector,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        norm="max",
        limit=spec.max_subdivisions,
        points=breaks or None,
        full_output=True,
    )
    value = complex(result[0], result[1])
    error = float(error)
    converged = bool(info.success) and error <= spec.tolerance(value)
    if not converged:
        logger.debug(
            "⚠️ Адаптивная квадратура на [%g, %g] не сошлась: ошибка %.3g, статус %s",
            a,
            b,
            error,
            info.status,
        )
    return QuadratureResult(
        value=value,
        error_estimate=error,
        evaluations=int(info.neval),
        converged=converged,
    )


def principal_value(
    f: Integrand,
    pole: float,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
) -> QuadratureResult:
    """
    Главное значение по Коши интеграла f(x)/(x - pole) на [a, b].

    Особенность вычитается аналитически:
    P∫ f/(x-p) = ∫ [f(x) - f(p)]/(x-p) dx + f(p)·ln|(b-p)/(p-a)|,
    полюс становится точкой разбиения и сам не вычисляется.

    Args:
        f: Гладкая в точке полюса функция
        pole: Положение полюса, a < pole < b
        a: Нижний предел
        b: Верхний предел
        spec: Допуски
        points: Дополнительные точки разбиения (резонансы и т.п.)

    Raises:
        ContractViolation: если полюс вне (a, b)
    """
    spec = spec or default_quadrature()
    if not a < pole < b:
        raise ContractViolation(
            f"principal_value needs a < pole < b, got pole={pole} on [{a}, {b}]"
        )

    guarded = _guarded(f)
    f_pole = guarded(pole)

    def regularized(x: float) -> complex:
        return (guarded(x) - f_pole) / (x - pole)

    breaks = [pole, *(points or [])]
    smooth = integrate_adaptive(regularized, a, b, spec, points=breaks)
    log_term = f_pole * log((b - pole) / (pole - a))
    return QuadratureResult(
        value=smooth.value + log_term,
        error_estimate=smooth.error_estimate,
        evaluations=smooth.evaluations + 1,
        converged=smooth.converged,
    )


def integrate_fourier(
    f: Integrand,
    a: float,
    b: float,
    frequency: float,
    spec: QuadratureSpec | None = None,
) -> QuadratureResult:
    """
    Интеграл ∫_a^b f(x)·exp(i·frequency·x) dx с весом Фурье (QAWO).

    Осциллирующий множитель интегрируется по моментам Чебышёва, поэтому
    число разбиений не растёт с частотой.
    """
    spec = spec or default_quadrature()
    if not a < b:
        raise ContractViolation(f"integrate_fourier needs a < b, got [{a}, {b}]")
    if frequency == 0.0:
        return integrate_adaptive(f, a, b, spec)

    guarded = _guarded(f)
    parts: dict[tuple[str, str], tuple[float, float, int, bool]] = {}
    for component in ("real", "imag"):

        def part(x: float, component: str = component) -> float:
            return getattr(guarded(x), component)

        for weight in ("cos", "sin"):
            out = integrate.quad(
                part,
                a,
                b,
                weight=weight,
                wvar=frequency,
                epsabs=spec.abs_tol,
                epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
                maxp1=max(50, spec.max_subdivisions),
                full_output=1,
            )
            # Четыре элемента в ответе означают предупреждение QUADPACK
            parts[(component, weight)] = (
                out[0],
                out[1],
                int(out[2].get("neval", 0)),
                len(out) == 3,
            )

    re_cos, re_sin = parts[("real", "cos")], parts[("real", "sin")]
    im_cos, im_sin = parts[("imag", "cos")], parts[("imag", "sin")]
    value = complex(re_cos[0] - im_sin[0], re_sin[0] + im_cos[0])
    error = sum(p[1] for p in parts.values())
    converged = all(p[3] for p in parts.values()) and error <= spec.tolerance(value)
    return QuadratureResult(
        value=value,
        error_estimate=error,
        evaluations=sum(p[2] for p in parts.values()),
        converged=converged,
    )


def _wynn_epsilon(partial_sums: Sequence[complex]) -> complex:
    """ε-алгоритм Винна: ускоренный предел последовательности частичных сумм."""
    current = np.asarray(partial_sums, dtype=complex)
    previous = np.zeros(current.size + 1, dtype=complex)
    best = current[-1]
    column = 0
    while current.size > 1:
        diff = current[1:] - current[:-1]
        scale = np.maximum(np.abs(current[1:]), np.finfo(float).tiny)
        if np.any(np.abs(diff) <= 1e-15 * scale):
            break
        following = previous[1 : current.size] + 1.0 / diff
        previous, current = current, following
        column += 1
        if column % 2 == 0:
            best = current[-1]
    return complex(best)


def integrate_semi_infinite_oscillatory(
    f: Integrand,
    a: float,
    spec: QuadratureSpec | None = None,
    panel_budget: int | None = None,
) -> QuadratureResult:
    """
    Интеграл ∫_a^∞ f(x) dx для затухающей (возможно осциллирующей) функции.

    Полуось режется на панели: по полпериода, если задан
    ``spec.oscillation_period_hint``, иначе панели удваиваются начиная с единичной.
    Каждая панель считается ``integrate_adaptive``, ряд панелей ускоряется
    ε-алгоритмом. Флаг converged отражает остаток ускоренного ряда.

    Args:
        f: Подынтегральная функция
        a: Нижний предел
        spec: Допуски и подсказка периода
        panel_budget: Максимум панелей (по умолчанию из настроек)

    Returns:
        QuadratureResult; converged=False, если затухание не обнаружено за бюджет
    """
    spec = spec or default_quadrature()
    budget = panel_budget or settings.PANEL_BUDGET
    hint = spec.oscillation_period_hint

    partial_sums: list[complex] = []
    estimates: list[complex] = []
    total = 0.0 + 0.0j
    error = 0.0
    evaluations = 0
    quiet_panels = 0
    left = float(a)
    width = 0.5 * hint if hint else 1.0

    for _ in range(budget):
        panel = integrate_adaptive(f, left, left + width, spec)
        total += panel.value
        error += panel.error_estimate
        evaluations += panel.evaluations
        partial_sums.append(total)
        estimate = _wynn_epsilon(partial_sums[-_EPSILON_WINDOW:])
        estimates.append(estimate)
        left += width
        if not hint:
            width *= 2.0

        # остаток и ошибки панелей вместе должны уложиться в допуск
        tol = 0.5 * spec.tolerance(estimate)
        small_panel = abs(panel.value) <= tol
        steady = len(estimates) >= 3 and all(
            abs(estimates[-k] - estimates[-k - 1]) <= tol for k in (1, 2)
        )
        quiet_panels = quiet_panels + 1 if small_panel else 0
        if quiet_panels >= 2 or steady:
            if quiet_panels >= 2:
                value, residual = total, abs(panel.value)
            else:
                value, residual = estimate, abs(estimates[-1] - estimates[-2])
            error_estimate = error + residual
            return QuadratureResult(
                value=value,
                error_estimate=error_estimate,
                evaluations=evaluations,
                converged=error_estimate <= spec.tolerance(value),
            )

    logger.warning(
        "⚠️ Полубесконечный интеграл от %g: затухание не обнаружено за %d панелей",
        a,
        budget,
    )
    residual = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else abs(total)
    return QuadratureResult(
        value=estimates[-1] if estimates else total,
        error_estimate=error + residual,
        evaluations=evaluations,
        converged=False,
    )
