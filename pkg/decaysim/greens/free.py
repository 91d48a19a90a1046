"""Тензор Грина вакуума и однородной среды в замкнутой форме."""

from math import pi

import numpy as np

from decaysim.exceptions import ContractViolation
from decaysim.greens.geometry import GreenSample, wavenumber
from decaysim.permittivity import PermittivityModel

# Точки ближе этого расстояния считаются совпадающими
_COINCIDENCE = 1e-300


def _as_position(r) -> np.ndarray:
    point = np.asarray(r, dtype=float)
    if point.shape != (3,):
        raise ContractViolation(f"position must be a 3-vector, got shape {point.shape}")
    return point


def free_dyadic(k: complex, r, r_prime) -> np.ndarray:
    """
    Диада G = e^{iu}/(4πR) [(1 + (iu−1)/u²) I + ((3 − 3iu − u²)/u²) R̂⊗R̂], u = kR.

    k может быть комплексным (поглощающая среда) и отрицательным по
    вещественной части (проверка сопряжения).
    """
    d = _as_position(r) - _as_position(r_prime)
    distance = float(np.linalg.norm(d))
    if distance <= _COINCIDENCE:
        raise ContractViolation(
            "Green tensor at r = r′ is singular; use im_green_at_atom for coincidence"
        )
    u = k * distance
    direction = d / distance
    prefactor = np.exp(1j * u) / (4.0 * pi * distance)
    isotropic = 1.0 + (1j * u - 1.0) / u**2
    radial = (3.0 - 3.0j * u - u**2) / u**2
    return prefactor * (isotropic * np.eye(3) + radial * np.outer(direction, direction))


def _check_omega(omega: float) -> None:
    if omega <= 0:
        raise ContractViolation(f"Green tensors need omega > 0, got {omega}")


def green_free(r, r_prime, omega: float) -> GreenSample:
    """Тензор Грина вакуума, k = ω."""
    _check_omega(omega)
    return GreenSample(
        matrix=free_dyadic(omega, r, r_prime),
        r=_as_position(r),
        r_prime=_as_position(r_prime),
        omega=omega,
    )


def green_bulk(r, r_prime, omega: float, model: PermittivityModel) -> GreenSample:
    """Тензор Грина однородной среды: та же диада с k = ω√ε(ω)."""
    _check_omega(omega)
    return GreenSample(
        matrix=free_dyadic(wavenumber(model, omega), r, r_prime),
        r=_as_position(r),
        r_prime=_as_position(r_prime),
        omega=omega,
    )


def _second_derivatives(field, point: np.ndarray, h: float) -> np.ndarray:
    """Центральные разности ∂_a∂_b field, массив [a, b, ...] со вторым порядком по h."""
    base = field(point)
    out = np.empty((3, 3, *base.shape), dtype=complex)
    unit = np.eye(3) * h
    for a in range(3):
        out[a, a] = (field(point + unit[a]) - 2.0 * base + field(point - unit[a])) / h**2
        for b in range(a + 1, 3):
            mixed = (
                field(point + unit[a] + unit[b])
                - field(point + unit[a] - unit[b])
                - field(point - unit[a] + unit[b])
                + field(point - unit[a] - unit[b])
            ) / (4.0 * h**2)
            out[a, b] = mixed
            out[b, a] = mixed
    return out


def curl_curl_residual(r, r_prime, omega: float, h: float = 1e-3) -> float:
    """
    Относительная невязка ∇×∇×G − k²G вне источника.

    Ротор ротора раскладывается как ∇(∇·G) − ∇²G, вторые производные берутся
    центральными разностями с шагом h. Норма: max|невязки| / (k²·max|G|).
    """
    _check_omega(omega)
    if h <= 0:
        raise ContractViolation(f"finite-difference step must be positive, got {h}")
    point = _as_position(r)
    source = _as_position(r_prime)
    if np.linalg.norm(point - source) <= 10.0 * h:
        raise ContractViolation("stencil touches the source point; move r or reduce h")

    k = omega

    def field(x: np.ndarray) -> np.ndarray:
        return free_dyadic(k, x, source)

    green = field(point)
    d2 = _second_derivatives(field, point, h)
    # grad_div[c, j] = Σ_a ∂_c∂_a G[a, j], laplacian[c, j] = Σ_a ∂_a∂_a G[c, j]
    grad_div = np.einsum("caaj->cj", d2)
    laplacian = np.einsum("aacj->cj", d2)
    residual = grad_div - laplacian - k**2 * green
    return float(np.max(np.abs(residual)) / (k**2 * np.max(np.abs(green))))
