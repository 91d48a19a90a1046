"""
Отражённая часть тензора Грина над диэлектрическим полупространством.

Интегралы Зоммерфельда по поперечному волновому числу q ∈ [0, ∞) берутся в
переменной k_z = √(k² − q²): q dq = −k_z dk_z снимает корневую особенность
в точке ветвления q = k. Распространяющаяся часть (q < k) идёт по k_z ∈ [0, k]
с весом Фурье e^{2ik_z z}, затухающая (q > k) по k_z = iκ, κ ∈ [0, ∞), где
множитель e^{−2κz} обеспечивает сходимость хвоста.
"""

from math import exp, pi

from decaysim.exceptions import ContractViolation, ConvergenceError
from decaysim.logger import logger
from decaysim.numerics import (
    QuadratureResult,
    QuadratureSpec,
    default_quadrature,
    integrate_fourier,
    integrate_semi_infinite_oscillatory,
)
from decaysim.permittivity import PermittivityModel, eval_permittivity, principal_root


def fresnel_coefficients(kz: complex, k: float, eps: complex) -> tuple[complex, complex]:
    """
    Коэффициенты отражения r_s, r_p границы вакуум–среда.

    k_z1 = √((ε − 1)k² + k_z²) берётся с Im k_z1 ≥ 0 (уходящая в среду волна).
    При k < 0 ветка продолжается как k_z1(−ω) = −k_z1(ω)*, так что и в
    прозрачной среде r(−ω) = r(ω)*.
    """
    arg = (eps - 1.0) * k * k + kz * kz
    if k > 0:
        kz1 = principal_root(arg)
    else:
        kz1 = -principal_root(arg.conjugate()).conjugate()
    r_s = (kz - kz1) / (kz + kz1)
    r_p = (eps * kz - kz1) / (eps * kz + kz1)
    return r_s, r_p


def _sommerfeld(
    weight,
    z: float,
    k: float,
    spec: QuadratureSpec,
) -> QuadratureResult:
    """∫₀^∞ dq (q/k_z) weight(k_z) e^{2ik_z z} как сумма двух участков по k_z."""
    if k > 0:
        propagating = integrate_fourier(weight, 0.0, k, 2.0 * z, spec)
    else:
        # при ω < 0 распространяющаяся ветка k_z ∈ [k, 0]
        propagating = integrate_fourier(weight, k, 0.0, 2.0 * z, spec).scaled(-1.0)
    evanescent = integrate_semi_infinite_oscillatory(
        lambda kappa: weight(1j * kappa) * exp(-2.0 * kappa * z),
        0.0,
        spec.with_period(1.0 / z),
    )
    return propagating + evanescent.scaled(-1j)


def halfspace_scatter_diag(
    z: float,
    omega: float,
    model: PermittivityModel,
    spec: QuadratureSpec | None = None,
) -> tuple[complex, complex]:
    """(g_xx, g_zz) для любого знака ω (отрицательный нужен проверке сопряжения)."""
    spec = spec or default_quadrature()
    if z <= 0:
        raise ContractViolation(f"atom must be above the interface, got z = {z}")
    if omega == 0:
        raise ContractViolation("half-space Green tensor needs omega != 0")
    if model.is_vacuum:
        return 0j, 0j

    k = omega
    eps = complex(eval_permittivity(model, omega))

    def parallel(kz: complex) -> complex:
        r_s, r_p = fresnel_coefficients(kz, k, eps)
        return r_s - r_p * kz * kz / (k * k)

    def perpendicular(kz: complex) -> complex:
        _, r_p = fresnel_coefficients(kz, k, eps)
        return (k * k - kz * kz) * r_p

    xx = _sommerfeld(parallel, z, k, spec)
    zz = _sommerfeld(perpendicular, z, k, spec)
    for name, part in (("xx", xx), ("zz", zz)):
        if not part.converged:
            raise ConvergenceError(
                f"Sommerfeld integral g_{name} at z={z:.6g}, ω={omega:.6g} did not converge",
                part,
            )
    logger.debug(
        "🧮 Полупространство z=%.4g ω=%.4g: %d вычислений", z, omega, xx.evaluations + zz.evaluations
    )
    g_xx = 1j / (8.0 * pi) * xx.value
    g_zz = 1j / (4.0 * pi * k * k) * zz.value
    return complex(g_xx), complex(g_zz)


def green_scatter_halfspace_diag(
    z: float,
    omega: float,
    model: PermittivityModel,
    spec: QuadratureSpec | None = None,
) -> tuple[complex, complex]:
    """
    Диагональные компоненты отражённого тензора в точке атома (x = y = 0, высота z).

    g_xx = (i/8π) ∫ dq (q/k_z)[r_s − r_p k_z²/k²] e^{2ik_z z},
    g_zz = (i/4π) ∫ dq (q³/(k_z k²)) r_p e^{2ik_z z}.

    Returns:
        (g_xx, g_zz); g_yy = g_xx по симметрии

    Raises:
        ContractViolation: z <= 0 или omega <= 0
        ConvergenceError: если квадратура не сошлась
    """
    if omega <= 0:
        raise ContractViolation(f"half-space Green tensor needs omega > 0, got {omega}")
    return halfspace_scatter_diag(z, omega, model, spec)
