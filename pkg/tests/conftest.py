"""Общие фикстуры тестов."""

import logging
from pathlib import Path

import numpy as np
import pytest

from decaysim.logger import logger
from decaysim.numerics import QuadratureSpec
from decaysim.permittivity import LorentzOscillator, PermittivityModel
from decaysim.spectral import AtomConfig, SpectralDensity

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def spec() -> QuadratureSpec:
    return QuadratureSpec()


@pytest.fixture
def reference_model() -> PermittivityModel:
    """Лоренцевская модель ω_T = 1, ω_P = 1, γ = 0.1."""
    return PermittivityModel(
        oscillators=(LorentzOscillator(omega_t=1.0, omega_p=1.0, gamma=0.1),)
    )


@pytest.fixture
def atom() -> AtomConfig:
    return AtomConfig(omega_a=1.0, gamma0=1e-3)


@pytest.fixture
def vacuum_sd() -> SpectralDensity:
    """S ≡ 1 на окне [0.2, 1.8]: вакуум, J ∝ ω."""
    return SpectralDensity.from_function(np.ones_like, (0.2, 1.8))


@pytest.fixture
def flat_sd() -> SpectralDensity:
    """S = ω_A/ω: постоянный вес J = Γ₀/2π на окне [0.2, 1.8]."""
    return SpectralDensity.from_function(lambda w: 1.0 / w, (0.2, 1.8))


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


class _Collector(logging.Handler):
    def __init__(self):
        super().__init__()
        self.records: list[logging.LogRecord] = []

    def emit(self, record):
        self.records.append(record)


@pytest.fixture
def log_records():
    """Записи логгера decaysim (он не передаёт их корневому, поэтому caplog их не видит)."""
    collector = _Collector()
    logger.addHandler(collector)
    yield collector.records
    logger.removeHandler(collector)
