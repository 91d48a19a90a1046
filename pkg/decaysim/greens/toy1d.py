"""
Одномерная модель: скалярная функция Грина уравнения
(−d²/dx² − ω²ε(x, ω)) g(x, x′) = δ(x − x′) для слоистой среды.

Решение строится из двух однородных решений: u_L уходит влево (e^{−ik₀x}
в левой полубесконечной среде), u_R уходит вправо (e^{ik_N(x−D)} в правой).
Внутри слоёв состояние (u, u′) переносится матрицами
[[cos kd, sin kd / k], [−k sin kd, cos kd]].
"""

from math import log

import numpy as np
from pydantic import BaseModel, ConfigDict

from decaysim.exceptions import ContractViolation, ConvergenceError, GeometryError
from decaysim.greens.geometry import Toy1D, wavenumber
from decaysim.logger import logger
from decaysim.numerics import QuadratureSpec, default_quadrature, integrate_adaptive
from decaysim.permittivity import eval_permittivity

State = tuple[complex, complex]


def _propagate(state: State, k: complex, distance: float) -> State:
    u, du = state
    c, s = np.cos(k * distance), np.sin(k * distance)
    return complex(u * c + du * s / k), complex(-u * k * s + du * c)


class Toy1DSolution:
    """Однородные решения u_L, u_R стопки слоёв на одной частоте."""

    def __init__(self, geometry: Toy1D, omega: float):
        self.geometry = geometry
        self.edges = geometry.interfaces
        self.k = [wavenumber(model, omega) for model in geometry.regions]
        n_layers = len(geometry.layers)

        # u_L: состояния на границах x_0..x_N при проходе слева направо
        self.left_states: list[State] = [(1.0 + 0j, -1j * self.k[0])]
        for j in range(n_layers):
            self.left_states.append(
                _propagate(self.left_states[-1], self.k[j + 1], self.edges[j + 1] - self.edges[j])
            )

        # u_R: состояния на границах при проходе справа налево
        right: list[State] = [(1.0 + 0j, 1j * self.k[-1])]
        for j in reversed(range(n_layers)):
            right.append(_propagate(right[-1], self.k[j + 1], self.edges[j] - self.edges[j + 1]))
        self.right_states = list(reversed(right))

        u, du = self.left_states[0]
        v, dv = self.right_states[0]
        self.wronskian = du * v - u * dv

    def _region(self, x: float) -> int:
        return self.geometry.region_index(x)

    def left_solution(self, x: float) -> State:
        """(u_L, u_L′) в точке x."""
        j = self._region(x)
        if j == 0:
            phase = np.exp(-1j * self.k[0] * x)
            return complex(phase), complex(-1j * self.k[0] * phase)
        return _propagate(self.left_states[j - 1], self.k[j], x - self.edges[j - 1])

    def right_solution(self, x: float) -> State:
        """(u_R, u_R′) в точке x."""
        j = self._region(x)
        last = len(self.k) - 1
        if j == last:
            phase = np.exp(1j * self.k[-1] * (x - self.edges[-1]))
            return complex(phase), complex(1j * self.k[-1] * phase)
        if j == 0:
            return _propagate(self.right_states[0], self.k[0], x - self.edges[0])
        return _propagate(self.right_states[j], self.k[j], x - self.edges[j])

    def green(self, x: float, x_prime: float) -> complex:
        lo, hi = min(x, x_prime), max(x, x_prime)
        return self.left_solution(lo)[0] * self.right_solution(hi)[0] / self.wronskian

    def green_derivative(self, x: float, s: float) -> complex:
        """∂g(x, s)/∂s."""
        if s > x:
            return self.left_solution(x)[0] * self.right_solution(s)[1] / self.wronskian
        return self.left_solution(s)[1] * self.right_solution(x)[0] / self.wronskian

    def green_by_source_jump(self, x: float, x_prime: float) -> complex:
        """
        Та же функция Грина из условий сшивки в источнике:
        g = A·u_L слева от x′, B·u_R справа, g непрерывна, скачок g′ равен −1.
        """
        u, du = self.left_solution(x_prime)
        v, dv = self.right_solution(x_prime)
        system = np.array([[u, -v], [-du, dv]], dtype=complex)
        a, b = np.linalg.solve(system, np.array([0.0, -1.0], dtype=complex))
        if x < x_prime:
            return complex(a * self.left_solution(x)[0])
        return complex(b * self.right_solution(x)[0])


def toy1d_green(
    x: float,
    x_prime: float,
    omega: float,
    layers: Toy1D,
) -> complex:
    """
    Скалярная функция Грина слоистой одномерной среды.

    В однородной среде g = i·e^{ik|x−x′|}/(2k), k = ω√ε.
    """
    if omega <= 0:
        raise ContractViolation(f"toy1d_green needs omega > 0, got {omega}")
    return complex(Toy1DSolution(layers, omega).green(x, x_prime))


def toy1d_green_by_source_jump(x: float, x_prime: float, omega: float, layers: Toy1D) -> complex:
    """Независимый путь расчёта (линейная система в точке источника) для проверки взаимности."""
    if omega <= 0:
        raise ContractViolation(f"toy1d_green needs omega > 0, got {omega}")
    return Toy1DSolution(layers, omega).green_by_source_jump(x, x_prime)


class IdentityCheck(BaseModel):
    """Результат проверки ω²∫ε″ g g* ds = Im g."""

    model_config = ConfigDict(frozen=True)

    lhs: float
    rhs: float
    defect: float
    boundary_term: float
    truncation_ok: bool

    def as_tuple(self) -> tuple[float, float, float]:
        return self.lhs, self.rhs, self.defect


def _require_absorption(layers: Toy1D, omega: float) -> list[float]:
    losses = [float(eval_permittivity(model, omega).imag) for model in layers.regions]
    if min(losses) <= 0:
        raise GeometryError(
            "the 1D identity needs ε″ > 0 in every region; "
            f"got ε″ = {', '.join(f'{v:.3g}' for v in losses)}"
        )
    return losses


def check_identity_1d(
    layers: Toy1D,
    x: float,
    x_prime: float,
    omega: float,
    spec: QuadratureSpec | None = None,
    tolerance: float = 1e-6,
) -> IdentityCheck:
    """
    Проверка тождества ω²∫ ds ε″(s) g(x, s) g*(x′, s) = Im g(x, x′).

    Область обрезается на расстоянии L от структуры, где поверхностный член
    (i/2)[u′v* − u v*′] меньше 0.1·tolerance. Если он всё же больше,
    результат помечается truncation_ok = False.

    Raises:
        GeometryError: если где-то ε″ = 0
        ConvergenceError: если квадратура левой части не сошлась
    """
    spec = spec or default_quadrature()
    if omega <= 0:
        raise ContractViolation(f"check_identity_1d needs omega > 0, got {omega}")
    losses = _require_absorption(layers, omega)
    solution = Toy1DSolution(layers, omega)
    outer_decay = min(solution.k[0].imag, solution.k[-1].imag)
    margin = log(100.0 / tolerance) / (2.0 * outer_decay)
    edges = solution.edges
    a = min(edges[0], x, x_prime) - margin
    b = max(edges[-1], x, x_prime) + margin

    def integrand(s: float) -> complex:
        loss = losses[layers.region_index(s)]
        return omega**2 * loss * solution.green(x, s) * solution.green(x_prime, s).conjugate()

    result = integrate_adaptive(integrand, a, b, spec, points=[*edges, x, x_prime])
    if not result.converged:
        raise ConvergenceError("1D identity left-hand side did not converge", result)

    def surface(s: float) -> complex:
        u, du = solution.green(x, s), solution.green_derivative(x, s)
        v, dv = solution.green(x_prime, s), solution.green_derivative(x_prime, s)
        return 0.5j * (du * v.conjugate() - u * dv.conjugate())

    boundary = abs(surface(b) - surface(a))
    lhs = float(result.value.real)
    rhs = float(solution.green(x, x_prime).imag)
    defect = abs(lhs - rhs) / abs(rhs)
    truncation_ok = boundary <= 0.1 * tolerance * abs(rhs)
    if not truncation_ok:
        logger.warning(
            "⚠️ Обрезка области [%g, %g]: поверхностный член %.3g выше допуска", a, b, boundary
        )
    return IdentityCheck(
        lhs=lhs, rhs=rhs, defect=defect, boundary_term=boundary, truncation_ok=truncation_ok
    )
