import math

import numpy as np
import pytest

from decaysim.exceptions import ContractViolation
from decaysim.permittivity import (
    LorentzOscillator,
    PermittivityModel,
    band_gap,
    eval_permittivity,
    kk_imag_from_real,
    kk_real_from_imag,
    kk_residual,
    kk_residuals,
    longitudinal_frequency,
    lorentz_matching,
    principal_root,
    refractive_index,
)


def test_closed_form(reference_model):
    omega = 0.7
    expected = 1.0 + 1.0 / (1.0 - omega**2 - 0.1j * omega)
    assert eval_permittivity(reference_model, omega) == pytest.approx(expected)


def test_array_input_keeps_shape(reference_model):
    values = eval_permittivity(reference_model, np.linspace(0.1, 2.0, 7))
    assert values.shape == (7,)
    assert np.all(values.imag > 0)


def test_vacuum_model_is_one():
    assert eval_permittivity(PermittivityModel(), 3.0) == 1.0
    assert PermittivityModel().is_vacuum


def test_conjugation_symmetry(reference_model):
    omega = 1.3
    assert eval_permittivity(reference_model, -omega) == pytest.approx(
        np.conj(eval_permittivity(reference_model, omega))
    )


def test_lower_half_plane_rejected(reference_model):
    with pytest.raises(ContractViolation):
        eval_permittivity(reference_model, 1.0 - 0.1j)


def test_upper_half_plane_allowed(reference_model):
    assert np.isfinite(eval_permittivity(reference_model, 1.0 + 0.5j))


def test_negative_gamma_rejected():
    with pytest.raises(ValueError):
        LorentzOscillator(omega_t=1.0, omega_p=1.0, gamma=-0.1)


def test_principal_root_branch():
    assert principal_root(complex(-4.0, -0.0)) == pytest.approx(2j)
    assert principal_root(-4.0 + 1e-3j).imag > 0
    roots = principal_root(np.array([-1.0, 4.0, -1.0 - 1j]))
    assert np.all(roots.imag >= 0)


def test_refractive_index(reference_model):
    n = refractive_index(reference_model, 0.8)
    assert n * n == pytest.approx(eval_permittivity(reference_model, 0.8))
    assert n.imag >= 0


def test_band_gap(reference_model):
    assert longitudinal_frequency(reference_model.oscillators[0]) == pytest.approx(math.sqrt(2.0))
    assert band_gap(reference_model) == [(1.0, pytest.approx(math.sqrt(2.0)))]


def test_lorentz_matching_parameters():
    model = lorentz_matching(2.0 + 0.2j, 1.0)
    osc = model.oscillators[0]
    assert osc.omega_t == pytest.approx(math.sqrt(2.0))
    assert osc.omega_p == pytest.approx(math.sqrt(1.04))
    assert osc.gamma == pytest.approx(0.2)
    assert eval_permittivity(model, 1.0) == pytest.approx(2.0 + 0.2j)


@pytest.mark.parametrize("eps_value", [2.0 + 1.0j, -3.0 + 0.5j, 1.01 + 0.005j])
def test_lorentz_matching_reproduces_value(eps_value):
    model = lorentz_matching(eps_value, 0.8)
    assert eval_permittivity(model, 0.8) == pytest.approx(eps_value, rel=1e-12)


def test_lorentz_matching_needs_loss():
    with pytest.raises(ContractViolation):
        lorentz_matching(2.0 + 0.0j, 1.0)


def test_kk_single_points(reference_model, spec):
    for omega in (0.5, 1.0, 2.5):
        eps = eval_permittivity(reference_model, omega)
        assert 1.0 + kk_real_from_imag(reference_model, omega, spec) == pytest.approx(eps.real, abs=1e-6)
        assert kk_imag_from_real(reference_model, omega, spec) == pytest.approx(eps.imag, abs=1e-6)


def test_kk_rejects_nonpositive_frequency(reference_model, spec):
    with pytest.raises(ContractViolation):
        kk_real_from_imag(reference_model, 0.0, spec)


def test_kk_residual_reference_grid(reference_model, spec):
    grid = np.linspace(0.2, 5.0, 50)
    real_res, imag_res = kk_residual(reference_model, grid, spec)
    assert real_res < 1e-4
    assert imag_res < 1e-4


def test_kk_residuals_vacuum_and_empty(spec):
    real_res, imag_res = kk_residuals(PermittivityModel(), [0.5, 1.0], spec)
    assert np.all(real_res == 0.0) and np.all(imag_res == 0.0)
    assert kk_residual(PermittivityModel(), [], spec) == (0.0, 0.0)


def test_kk_residual_needs_ascending_grid(reference_model, spec):
    with pytest.raises(ContractViolation):
        kk_residual(reference_model, [1.0, 0.5], spec)
