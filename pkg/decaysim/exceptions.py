"""Иерархия исключений пакета."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from decaysim.numerics import QuadratureResult


class DecaySimError(Exception):
    """Базовое исключение пакета."""


class ContractViolation(DecaySimError, ValueError):
    """Нарушено предусловие операции (неверные аргументы)."""


class HorizonError(ContractViolation):
    """Запрошенный горизонт превышает время возврата дискретного резервуара."""

    def __init__(self, t_max: float, bound: float):
        self.t_max = t_max
        self.bound = bound
        super().__init__(
            f"horizon t_max={t_max:.6g} exceeds the recurrence time 2π/Δω={bound:.6g}"
        )


class IntegrandError(DecaySimError, ArithmeticError):
    """Подынтегральная функция вернула NaN или бесконечность."""

    def __init__(self, abscissa: float, value: Any):
        self.abscissa = abscissa
        self.value = value
        super().__init__(f"integrand returned {value!r} at x={abscissa!r}")


class ConvergenceError(DecaySimError):
    """Квадратура не сошлась, а вызывающий код не может продолжить."""

    def __init__(self, message: str, result: QuadratureResult | None = None):
        self.result = result
        if result is not None:
            message = (
                f"{message} (value={result.value:.6g}, "
                f"error={result.error_estimate:.3g}, evaluations={result.evaluations})"
            )
        super().__init__(message)


class GeometryError(DecaySimError):
    """Геометрия не поддерживает запрошенную операцию (атом в поглотителе и т.п.)."""


class ConfigError(DecaySimError):
    """Ошибки разбора конфигурации: список (секция, ключ, причина)."""

    def __init__(self, issues: list[tuple[str, str, str]]):
        self.issues = issues
        lines = [f"[{section}] {key}: {reason}" for section, key, reason in issues]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
