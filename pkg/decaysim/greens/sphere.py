"""
Сферическая микрополость: атом в центре, стенка из среды до бесконечности.

Для диполя в центре работает только электрическая мода l = 1. Функции
Риккати–Бесселя ψ(x) = x·j₁(x), ξ(x) = x·h₁(x) и их производные берутся в
замкнутом виде и годятся для комплексного аргумента.
"""

from cmath import cos, exp, sin
from math import pi

from decaysim.exceptions import ContractViolation
from decaysim.greens.geometry import wavenumber
from decaysim.permittivity import PermittivityModel


def riccati_psi(x: complex) -> tuple[complex, complex]:
    """ψ(x) = sin x / x − cos x и ψ′(x)."""
    s, c = sin(x), cos(x)
    return s / x - c, c / x - s / x**2 + s


def riccati_xi(x: complex) -> tuple[complex, complex]:
    """ξ(x) = −e^{ix}(1 + i/x) и ξ′(x) = e^{ix}(−i + 1/x + i/x²)."""
    phase = exp(1j * x)
    return -phase * (1.0 + 1j / x), phase * (-1j + 1.0 / x + 1j / x**2)


def _log_derivative_xi(y: complex) -> complex:
    """ξ′(y)/ξ(y) без экспоненты: не переполняется при большом Im y."""
    return -(-1j + 1.0 / y + 1j / y**2) / (1.0 + 1j / y)


def _reflection(radius: float, omega: float, wall: PermittivityModel) -> complex:
    """
    R1 для любого знака ω (отрицательный нужен проверке сопряжения).

    Сшивка касательных полей внутренней стоячей волны ξ(x) + R1·ψ(x)
    с уходящей волной в стенке даёт
    R1 = [D·ξ(x) − n·ξ′(x)] / [n·ψ′(x) − D·ψ(x)], D = ξ′(y)/ξ(y).
    """
    k = omega
    k_wall = wavenumber(wall, omega)
    n = k_wall / k
    x = k * radius
    y = k_wall * radius
    psi, dpsi = riccati_psi(x)
    xi, dxi = riccati_xi(x)
    d = _log_derivative_xi(y)
    return (d * xi - n * dxi) / (n * dpsi - d * psi)


def sphere_center_reflection(
    radius: float,
    omega: float,
    wall: PermittivityModel,
) -> complex:
    """
    Коэффициент отражения R1 моды l = 1 в центре полости.

    Рассеянная часть тензора Грина в центре изотропна: G_s = (ik/6π)·R1·I,
    поэтому S = 1 + Re R1.

    Raises:
        ContractViolation: radius <= 0 или omega <= 0
    """
    if radius <= 0:
        raise ContractViolation(f"cavity radius must be positive, got {radius}")
    if omega <= 0:
        raise ContractViolation(f"sphere reflection needs omega > 0, got {omega}")
    if wall.is_vacuum:
        return 0j
    return complex(_reflection(radius, omega, wall))


def sphere_scatter_green(radius: float, omega: float, wall: PermittivityModel) -> complex:
    """Скалярный множитель g_s изотропного тензора G_s = g_s·I в центре (любой знак ω)."""
    if wall.is_vacuum:
        return 0j
    return 1j * omega / (6.0 * pi) * _reflection(radius, omega, wall)


def sphere_wall_reflectance(r1: complex) -> complex:
    """
    ρ = R1/(2 + R1): отношение амплитуд входящей и уходящей волн в полости.

    Пассивная стенка даёт |ρ| ≤ 1, что равносильно S = 1 + Re R1 ≥ 0.
    """
    return r1 / (2.0 + r1)


def sphere_flux_balance(
    radius: float, omega: float, wall: PermittivityModel
) -> tuple[float, float]:
    """
    Радиальный поток энергии у стенки, посчитанный с двух сторон.

    Изнутри поток Im(f′·f̄) стоячей волны f = ξ + R1·ψ; снаружи тот же поток
    по прошедшей волне T·ξ(y) в стенке. Нормировка такова, что вакуумная
    уходящая волна несёт единичный поток, а внутренний поток равен S.
    """
    if radius <= 0 or omega <= 0:
        raise ContractViolation("sphere_flux_balance needs radius > 0 and omega > 0")
    r1 = _reflection(radius, omega, wall) if not wall.is_vacuum else 0j
    k = omega
    k_wall = wavenumber(wall, omega)
    n = k_wall / k
    x = k * radius
    y = k_wall * radius
    psi, dpsi = riccati_psi(x)
    xi, dxi = riccati_xi(x)
    inner = xi + r1 * psi
    inner_prime = dxi + r1 * dpsi
    inside = (inner_prime * inner.conjugate()).imag

    # Непрерывность H_tan: f(x)/x = T·ξ(y)/y
    xi_y, dxi_y = riccati_xi(y)
    transmitted = inner / x * y / xi_y
    e_out = transmitted * dxi_y / (n * y)
    h_out = transmitted * xi_y / y
    outside = (x * x * e_out * h_out.conjugate()).imag
    return float(inside), float(outside)
