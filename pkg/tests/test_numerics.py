import math

import numpy as np
import pytest
from scipy.special import sici

from decaysim.exceptions import ContractViolation, IntegrandError
from decaysim.numerics import (
    QuadratureResult,
    QuadratureSpec,
    _wynn_epsilon,
    integrate_adaptive,
    integrate_fourier,
    integrate_semi_infinite_oscillatory,
    principal_value,
)


def test_adaptive_polynomial(spec):
    result = integrate_adaptive(lambda x: x * x, 0.0, 1.0, spec)
    assert result.converged
    assert result.value == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_adaptive_complex_integrand(spec):
    result = integrate_adaptive(lambda x: np.exp(1j * x), 0.0, math.pi, spec)
    assert abs(result.value - 2j) < 1e-10


def test_adaptive_rejects_empty_interval(spec):
    with pytest.raises(ContractViolation):
        integrate_adaptive(lambda x: x, 1.0, 1.0, spec)


def test_adaptive_reports_nan(spec):
    with pytest.raises(IntegrandError) as info:
        integrate_adaptive(lambda x: math.nan, 0.0, 1.0, spec)
    assert 0.0 <= info.value.abscissa <= 1.0


def test_principal_value_log(spec):
    # P∫₀² dx/(x − 0.5) = ln 3
    result = principal_value(lambda x: 1.0, 0.5, 0.0, 2.0, spec)
    assert result.converged
    assert result.value.real == pytest.approx(math.log(3.0), rel=1e-10)


def test_principal_value_symmetric_is_zero(spec):
    result = principal_value(lambda x: 1.0, 1.0, 0.0, 2.0, spec)
    assert abs(result.value) < 1e-12


def test_principal_value_smooth_numerator(spec):
    # P∫₀² x/(x − 1) dx = 2 + ln 1 = 2
    result = principal_value(lambda x: x, 1.0, 0.0, 2.0, spec)
    assert result.value.real == pytest.approx(2.0, rel=1e-10)


def test_principal_value_pole_outside(spec):
    with pytest.raises(ContractViolation):
        principal_value(lambda x: 1.0, 3.0, 0.0, 2.0, spec)


def test_fourier_high_frequency(spec):
    result = integrate_fourier(lambda x: 1.0, 0.0, 1.0, 50.0, spec)
    expected = (np.exp(50j) - 1.0) / 50j
    assert result.converged
    assert abs(result.value - expected) < 1e-10


def test_fourier_complex_amplitude(spec):
    # ∫₀¹ (1 + i x) e^{3ix} dx
    result = integrate_fourier(lambda x: 1.0 + 1j * x, 0.0, 1.0, 3.0, spec)
    reference = integrate_adaptive(lambda x: (1.0 + 1j * x) * np.exp(3j * x), 0.0, 1.0, spec)
    assert abs(result.value - reference.value) < 1e-10


def test_fourier_zero_frequency_falls_back(spec):
    result = integrate_fourier(lambda x: x, 0.0, 2.0, 0.0, spec)
    assert result.value == pytest.approx(2.0)


def test_semi_infinite_exponential(spec):
    result = integrate_semi_infinite_oscillatory(lambda x: math.exp(-x), 0.0, spec)
    assert result.converged
    assert result.value.real == pytest.approx(1.0, rel=1e-8)


def test_semi_infinite_damped_oscillation():
    spec = QuadratureSpec().with_period(2.0 * math.pi)
    result = integrate_semi_infinite_oscillatory(
        lambda x: math.exp(-0.1 * x) * math.cos(x), 0.0, spec
    )
    # ∫₀^∞ e^{−ax} cos x dx = a / (a² + 1)
    assert result.value.real == pytest.approx(0.1 / 1.01, rel=1e-7)


def test_wynn_epsilon_accelerates_alternating_series():
    partial = np.cumsum([(-1) ** (n + 1) / n for n in range(1, 15)])
    assert abs(_wynn_epsilon(partial) - math.log(2.0)) < 1e-7
    assert abs(partial[-1] - math.log(2.0)) > 1e-2


def test_result_addition():
    a = QuadratureResult(value=1.0, error_estimate=1e-9, evaluations=10, converged=True)
    b = QuadratureResult(value=2j, error_estimate=1e-9, evaluations=5, converged=False)
    total = a + b
    assert total.value == 1.0 + 2j
    assert total.evaluations == 15
    assert not total.converged
    assert a.scaled(-1j).value == -1j


def test_sinc_tail(spec):
    result = integrate_semi_infinite_oscillatory(
        lambda x: math.sin(x) / x, 1.0, spec.with_period(2.0 * math.pi)
    )
    si_one, _ = sici(1.0)
    assert result.value.real == pytest.approx(math.pi / 2 - si_one, rel=1e-6)
    assert abs(result.value.imag) < 1e-12


def test_adaptive_is_linear(spec):
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b = rng.uniform(-2.0, 2.0), rng.uniform(0.0, 5.0)
        alpha, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        first = integrate_adaptive(lambda x, a=a: math.exp(a * x), 0.0, 1.0, spec).value
        second = integrate_adaptive(lambda x, b=b: math.cos(b * x), 0.0, 1.0, spec).value
        combined = integrate_adaptive(
            lambda x, a=a, b=b, alpha=alpha, beta=beta: alpha * math.exp(a * x) + beta * math.cos(b * x),
            0.0,
            1.0,
            spec,
        ).value
        expected = alpha * first + beta * second
        assert abs(combined - expected) <= 2 * spec.tolerance(abs(alpha * first) + abs(beta * second))


def test_adaptive_is_additive(spec):
    def peak(x):
        return 1.0 / (1.0 + 400.0 * (x - 0.6) ** 2)

    for a, b, c in [(0.0, 0.3, 1.0), (0.0, 0.6, 1.0), (-1.0, 0.55, 2.0)]:
        left = integrate_adaptive(peak, a, b, spec).value
        right = integrate_adaptive(peak, b, c, spec).value
        whole = integrate_adaptive(peak, a, c, spec).value
        assert abs(left + right - whole) <= 2 * spec.tolerance(whole)


def test_error_estimate_bounds_the_error():
    spec = QuadratureSpec(rel_tol=1e-6, abs_tol=0.0)
    rng = np.random.default_rng(5)
    bounded = 0
    trials = 40
    for _ in range(trials):
        sharpness = 10.0 ** rng.uniform(2.0, 4.0)
        center = rng.uniform(0.2, 0.8)
        result = integrate_adaptive(
            lambda x, s=sharpness, m=center: 1.0 / (1.0 + s * (x - m) ** 2), 0.0, 1.0, spec
        )
        root = math.sqrt(sharpness)
        exact = (math.atan(root * (1.0 - center)) + math.atan(root * center)) / root
        if result.converged:
            assert result.error_estimate <= spec.tolerance(result.value)
        if abs(result.value - exact) <= result.error_estimate:
            bounded += 1
    assert bounded >= 0.95 * trials
