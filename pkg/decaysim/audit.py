"""
Набор численных проверок (команда `audit`).

Каждая проверка возвращает AuditCheck с измеренным значением и порогом;
исключения внутри проверки не прерывают набор, а превращаются в провал.
"""

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict

from decaysim.dynamics import TimeGrid, discrete_bath_oracle, solve_volterra
from decaysim.exceptions import DecaySimError
from decaysim.greens import (
    FreeSpace,
    HalfSpace,
    HomogeneousBulk,
    Slab,
    SphereCavityCenter,
    Toy1D,
    check_conjugation,
    check_identity_1d,
    check_reciprocity,
    curl_curl_residual,
    im_green_at_atom,
    psd_defect,
)
from decaysim.logger import logger
from decaysim.permittivity import (
    LorentzOscillator,
    PermittivityModel,
    kk_residual,
    lorentz_matching,
)
from decaysim.runconfig import RunConfig
from decaysim.spectral import build_spectral_density, kernel_table

RECIPROCITY_LIMIT = 1e-10
CONJUGATION_LIMIT = 1e-10
# обе частоты через квадратуры Зоммерфельда: предел задаёт точность интегралов
HALFSPACE_CONJUGATION_FACTOR = 100.0
CURL_CURL_LIMIT = 1e-4
IDENTITY_LIMIT = 1e-5
KK_LIMIT = 1e-4
PSD_LIMIT = 1e-12


class AuditCheck(BaseModel):
    """Результат одной проверки."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def _absorbing_stack() -> Toy1D:
    """Двухслойная стопка с фоновым поглощением ε″ = 0.05 везде."""
    background = lorentz_matching(2.0 + 0.05j, 1.0)
    return Toy1D(
        left=background,
        layers=(
            Slab(thickness=0.7, model=lorentz_matching(4.0 + 0.05j, 1.0)),
            Slab(thickness=1.3, model=lorentz_matching(1.5 + 0.05j, 1.0)),
        ),
        right=background,
    )


def _reference_model() -> PermittivityModel:
    return PermittivityModel(
        oscillators=(LorentzOscillator(omega_t=1.0, omega_p=1.0, gamma=0.1),)
    )


def _random_pairs(rng: np.random.Generator, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    pairs = []
    while len(pairs) < n:
        r, r_prime = rng.uniform(-2.0, 2.0, 3), rng.uniform(-2.0, 2.0, 3)
        if np.linalg.norm(r - r_prime) > 0.1:
            pairs.append((r, r_prime))
    return pairs


def _check_reciprocity(cfg: RunConfig) -> AuditCheck:
    rng = np.random.default_rng(cfg.audit.seed)
    omega = cfg.atom.omega_a
    bulk = HomogeneousBulk(model=lorentz_matching(2.0 + 0.2j, omega))
    worst = 0.0
    for r, r_prime in _random_pairs(rng, cfg.audit.n_pairs):
        worst = max(worst, check_reciprocity(FreeSpace(), r, r_prime, omega))
        worst = max(worst, check_reciprocity(bulk, r, r_prime, omega))
    stack = cfg.geometry if isinstance(cfg.geometry, Toy1D) else _absorbing_stack()
    for x, x_prime in rng.uniform(-1.0, 3.0, (cfg.audit.n_pairs, 2)):
        worst = max(worst, check_reciprocity(stack, x, x_prime, omega))
    return AuditCheck(
        name="reciprocity",
        passed=worst < RECIPROCITY_LIMIT,
        value=worst,
        threshold=RECIPROCITY_LIMIT,
        detail=f"{cfg.audit.n_pairs} pairs per geometry",
    )


def _check_conjugation(cfg: RunConfig) -> AuditCheck:
    rng = np.random.default_rng(cfg.audit.seed + 1)
    omega = cfg.atom.omega_a
    bulk = HomogeneousBulk(model=lorentz_matching(2.0 + 0.2j, omega))
    geometry = cfg.geometry
    sphere = (
        geometry
        if isinstance(geometry, SphereCavityCenter)
        else SphereCavityCenter(radius=10.0, wall=lorentz_matching(2.0 + 0.2j, omega))
    )
    worst = check_conjugation(sphere, omega)
    for r, r_prime in _random_pairs(rng, cfg.audit.n_pairs):
        worst = max(worst, check_conjugation(FreeSpace(), omega, r, r_prime))
        worst = max(worst, check_conjugation(bulk, omega, r, r_prime))
    stack = geometry if isinstance(geometry, Toy1D) else _absorbing_stack()
    for x, x_prime in rng.uniform(-1.0, 3.0, (cfg.audit.n_pairs, 2)):
        worst = max(worst, check_conjugation(stack, omega, x, x_prime))
    return AuditCheck(
        name="conjugation",
        passed=worst < CONJUGATION_LIMIT,
        value=worst,
        threshold=CONJUGATION_LIMIT,
    )


def _check_halfspace_conjugation(cfg: RunConfig) -> AuditCheck:
    omega = cfg.atom.omega_a
    geometry = cfg.geometry
    if not isinstance(geometry, HalfSpace):
        geometry = HalfSpace(model=lorentz_matching(2.0 + 1.0j, omega), z_atom=0.3 / omega)
    limit = HALFSPACE_CONJUGATION_FACTOR * cfg.tolerances.rel_tol
    defect = check_conjugation(geometry, omega, spec=cfg.tolerances)
    return AuditCheck(
        name="halfspace_conjugation",
        passed=defect < limit,
        value=defect,
        threshold=limit,
        detail=f"z·ω_A = {geometry.z_atom * omega:.3g}",
    )


def _check_curl_curl(cfg: RunConfig) -> AuditCheck:
    residual = curl_curl_residual((0.4, -0.3, 1.9), (0.0, 0.0, 0.0), cfg.atom.omega_a, h=1e-3)
    return AuditCheck(
        name="curl_curl_residual",
        passed=residual < CURL_CURL_LIMIT,
        value=residual,
        threshold=CURL_CURL_LIMIT,
    )


def _check_identity(cfg: RunConfig) -> AuditCheck:
    homogeneous = lorentz_matching(2.0 + 0.2j, 1.0)
    cases = [
        (Toy1D(left=homogeneous, right=homogeneous), 0.3, 0.3),
        (_absorbing_stack(), 0.4, 1.5),
    ]
    if isinstance(cfg.geometry, Toy1D):
        cases.append((cfg.geometry, 0.0, 0.0))
    worst = 0.0
    truncated = True
    for stack, x, x_prime in cases:
        result = check_identity_1d(stack, x, x_prime, 1.0, cfg.tolerances)
        worst = max(worst, result.defect)
        truncated = truncated and result.truncation_ok
    return AuditCheck(
        name="green_identity_1d",
        passed=worst < IDENTITY_LIMIT and truncated,
        value=worst,
        threshold=IDENTITY_LIMIT,
        detail="" if truncated else "domain truncation above tolerance",
    )


def _check_kk(cfg: RunConfig) -> AuditCheck:
    if cfg.materials:
        name, model = cfg.eps_material()
    else:
        name, model = "reference", _reference_model()
    if model.is_vacuum:
        return AuditCheck(name="kramers_kronig", passed=True, value=0.0, threshold=KK_LIMIT, detail=f"{name}: vacuum")
    omega_t = model.max_omega_t
    grid = np.linspace(0.2 * omega_t, 5.0 * omega_t, cfg.audit.kk_points)
    real_res, imag_res = kk_residual(model, grid, cfg.tolerances, cfg.run.n_jobs)
    worst = max(real_res, imag_res)
    return AuditCheck(
        name="kramers_kronig",
        passed=worst < KK_LIMIT,
        value=worst,
        threshold=KK_LIMIT,
        detail=f"material {name}",
    )


def _check_positivity(cfg: RunConfig) -> AuditCheck:
    geometry = cfg.geometry
    if isinstance(geometry, Toy1D):
        return AuditCheck(
            name="im_green_positivity", passed=True, value=0.0, threshold=PSD_LIMIT, detail="n/a for Toy1D"
        )
    low, high = cfg.window_bounds
    worst = 0.0
    for omega in np.linspace(low, high, 9):
        matrix = im_green_at_atom(geometry, float(omega), cfg.tolerances)
        scale = max(float(np.max(np.abs(matrix))), 1e-300)
        worst = max(worst, psd_defect(matrix) / scale)
    return AuditCheck(
        name="im_green_positivity",
        passed=worst <= PSD_LIMIT,
        value=worst,
        threshold=PSD_LIMIT,
    )


def _check_oracle(cfg: RunConfig) -> AuditCheck:
    geometry = cfg.geometry
    if isinstance(geometry, Toy1D):
        return AuditCheck(
            name="solver_vs_oracle",
            passed=True,
            value=0.0,
            threshold=cfg.audit.oracle_tolerance,
            detail="n/a for Toy1D",
        )
    low, high = cfg.window_bounds
    n_modes = cfg.audit.n_modes
    recurrence = 2.0 * np.pi * n_modes / (high - low)
    horizon = min(cfg.horizon, 0.9 * recurrence)
    n_steps = max(2, round(cfg.time.n_steps * horizon / cfg.horizon))
    grid = TimeGrid(t_max=horizon, n_steps=n_steps)
    sd = build_spectral_density(
        geometry,
        cfg.atom,
        (low, high),
        cfg.window.n_samples,
        cfg.tolerances,
        cfg.window.refine_tol,
        cfg.run.n_jobs,
    )
    table = kernel_table(sd, cfg.atom, grid.dt, grid.n_steps, cfg.tolerances, cfg.run.n_jobs)
    volterra = solve_volterra(table, grid)
    oracle = discrete_bath_oracle(sd, cfg.atom, n_modes, grid)
    deviation = float(np.max(np.abs(volterra.c_values - oracle.c_values)))
    return AuditCheck(
        name="solver_vs_oracle",
        passed=deviation < cfg.audit.oracle_tolerance,
        value=deviation,
        threshold=cfg.audit.oracle_tolerance,
        detail=f"{n_modes} modes, horizon {horizon * cfg.atom.gamma0:.3g}/Γ₀",
    )


CHECKS: tuple[Callable[[RunConfig], AuditCheck], ...] = (
    _check_reciprocity,
    _check_conjugation,
    _check_halfspace_conjugation,
    _check_curl_curl,
    _check_identity,
    _check_kk,
    _check_positivity,
    _check_oracle,
)


def run_audit(cfg: RunConfig) -> list[AuditCheck]:
    """Прогоняет все проверки; ошибка внутри проверки засчитывается как провал."""
    results = []
    for check in CHECKS:
        name = check.__name__.removeprefix("_check_")
        try:
            result = check(cfg)
        except DecaySimError as exc:
            logger.error("❌ Проверка %s упала: %s", name, exc)
            result = AuditCheck(name=name, passed=False, value=float("nan"), threshold=0.0, detail=str(exc))
        status = "✅" if result.passed else "❌"
        logger.info("%s %s: %.3g (порог %.3g)", status, result.name, result.value, result.threshold)
        results.append(result)
    return results
