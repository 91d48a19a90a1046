"""
Im G в точке атома и численные проверки свойств тензора Грина:
взаимность G(r, r′) = Gᵀ(r′, r), сопряжение G(ω)* = G(−ω),
положительная полуопределённость Im G.
"""

from math import pi

import numpy as np

from decaysim.config import settings
from decaysim.exceptions import ContractViolation, GeometryError
from decaysim.greens.free import free_dyadic
from decaysim.greens.geometry import (
    FreeSpace,
    Geometry,
    HalfSpace,
    HomogeneousBulk,
    SphereCavityCenter,
    Toy1D,
    wavenumber,
)
from decaysim.greens.halfspace import green_scatter_halfspace_diag, halfspace_scatter_diag
from decaysim.greens.sphere import sphere_center_reflection, sphere_scatter_green
from decaysim.greens.toy1d import Toy1DSolution, toy1d_green, toy1d_green_by_source_jump
from decaysim.numerics import QuadratureSpec, default_quadrature
from decaysim.permittivity import eval_permittivity


def im_green_at_atom(
    geometry: Geometry, omega: float, spec: QuadratureSpec | None = None
) -> np.ndarray:
    """
    Im G(r_A, r_A, ω): конечный вакуумный вклад (ω/6π)·I плюс рассеянная часть.

    Raises:
        ContractViolation: omega <= 0
        GeometryError: атом в поглощающей среде или одномерная геометрия
    """
    spec = spec or default_quadrature()
    if omega <= 0:
        raise ContractViolation(f"im_green_at_atom needs omega > 0, got {omega}")
    free = omega / (6.0 * pi)

    match geometry:
        case FreeSpace():
            return free * np.eye(3)
        case HomogeneousBulk(model=model):
            eps = eval_permittivity(model, omega)
            if eps.imag > settings.TRANSPARENCY_TOL:
                raise GeometryError(
                    f"atom inside an absorbing medium (ε″ = {eps.imag:.3g} at ω = {omega:.6g}): "
                    "Im G diverges at coincidence"
                )
            return wavenumber(model, omega).real / (6.0 * pi) * np.eye(3)
        case HalfSpace(model=model, z_atom=z):
            g_xx, g_zz = green_scatter_halfspace_diag(z, omega, model, spec)
            return np.diag([free + g_xx.imag, free + g_xx.imag, free + g_zz.imag])
        case SphereCavityCenter(radius=radius, wall=wall):
            r1 = sphere_center_reflection(radius, omega, wall)
            return free * (1.0 + r1.real) * np.eye(3)
        case Toy1D():
            raise GeometryError("Toy1D has no three-dimensional atom position")
    raise GeometryError(f"unsupported geometry {type(geometry).__name__}")


def psd_defect(matrix: np.ndarray) -> float:
    """Наибольшее по модулю отрицательное собственное значение (0, если матрица ≥ 0)."""
    eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return float(max(0.0, -eigenvalues.min()))


def _relative_max(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def _coincidence_matrix(geometry: Geometry, omega: float, spec: QuadratureSpec) -> np.ndarray:
    """Рассеянная часть G_s(r_A, r_A) для геометрий, где она известна только в точке атома."""
    match geometry:
        case HalfSpace(model=model, z_atom=z):
            g_xx, g_zz = green_scatter_halfspace_diag(z, omega, model, spec)
            return np.diag([g_xx, g_xx, g_zz])
        case SphereCavityCenter(radius=radius, wall=wall):
            return sphere_scatter_green(radius, omega, wall) * np.eye(3)
    raise GeometryError(f"{type(geometry).__name__} has no coincidence-only Green tensor")


def check_reciprocity(
    geometry: Geometry,
    r,
    r_prime,
    omega: float,
    spec: QuadratureSpec | None = None,
) -> float:
    """
    ‖G(r, r′) − Gᵀ(r′, r)‖_max / ‖G‖_max.

    Для Toy1D r и r′ скаляры, а G(r′, r) считается независимым путём
    (сшивка в точке источника). Для полупространства и сферы тензор
    известен только в точке атома, там r и r′ игнорируются.
    """
    spec = spec or default_quadrature()
    if omega <= 0:
        raise ContractViolation(f"check_reciprocity needs omega > 0, got {omega}")
    match geometry:
        case FreeSpace():
            forward = free_dyadic(omega, r, r_prime)
            backward = free_dyadic(omega, r_prime, r)
            return _relative_max(forward, backward.T)
        case HomogeneousBulk(model=model):
            k = wavenumber(model, omega)
            return _relative_max(free_dyadic(k, r, r_prime), free_dyadic(k, r_prime, r).T)
        case Toy1D():
            forward = toy1d_green(float(r), float(r_prime), omega, geometry)
            backward = toy1d_green_by_source_jump(float(r_prime), float(r), omega, geometry)
            return _relative_max(np.array([forward]), np.array([backward]))
        case HalfSpace() | SphereCavityCenter():
            matrix = _coincidence_matrix(geometry, omega, spec)
            return _relative_max(matrix, matrix.T)
    raise GeometryError(f"unsupported geometry {type(geometry).__name__}")


def check_conjugation(
    geometry: Geometry,
    omega: float,
    r=None,
    r_prime=None,
    spec: QuadratureSpec | None = None,
) -> float:
    """
    ‖G(ω)* − G(−ω)‖_max / ‖G‖_max, где G(−ω) строится с k → −k*.

    Поддерживаются FreeSpace, HomogeneousBulk и Toy1D вне совпадения точек,
    рассеянная часть в центре сферы и над полупространством (r, r′
    игнорируются). Для полупространства обе частоты считаются квадратурой,
    так что дефект порядка spec.rel_tol.
    """
    if omega <= 0:
        raise ContractViolation(f"check_conjugation needs omega > 0, got {omega}")
    match geometry:
        case FreeSpace():
            positive = free_dyadic(omega, r, r_prime)
            return _relative_max(np.conj(positive), free_dyadic(-omega, r, r_prime))
        case HomogeneousBulk(model=model):
            positive = free_dyadic(wavenumber(model, omega), r, r_prime)
            negative = free_dyadic(wavenumber(model, -omega), r, r_prime)
            return _relative_max(np.conj(positive), negative)
        case HalfSpace(model=model, z_atom=z):
            spec = spec or default_quadrature()
            positive = np.array(halfspace_scatter_diag(z, omega, model, spec))
            negative = np.array(halfspace_scatter_diag(z, -omega, model, spec))
            return _relative_max(np.conj(positive), negative)
        case SphereCavityCenter(radius=radius, wall=wall):
            positive = sphere_scatter_green(radius, omega, wall)
            negative = sphere_scatter_green(radius, -omega, wall)
            return _relative_max(np.array([np.conj(positive)]), np.array([negative]))
        case Toy1D():
            positive = Toy1DSolution(geometry, omega).green(float(r), float(r_prime))
            negative = Toy1DSolution(geometry, -omega).green(float(r), float(r_prime))
            return _relative_max(np.array([np.conj(positive)]), np.array([negative]))
    raise GeometryError(f"conjugation check is not implemented for {type(geometry).__name__}")
