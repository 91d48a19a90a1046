"""Конфигурация приложения."""

import os

from pydantic_settings import (  # pylint: disable=import-error
    BaseSettings,
    SettingsConfigDict,
)

from decaysim import __version__


class Settings(BaseSettings):
    """Настройки приложения."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )
    # Определение окружения
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")

    # Основные настройки
    APP_NAME: str = "decaysim"
    APP_VERSION: str = __version__

    # Квадратуры (значения по умолчанию для всей библиотеки)
    REL_TOL: float = 1e-8
    ABS_TOL: float = 1e-12
    MAX_SUBDIVISIONS: int = 500
    PANEL_BUDGET: int = 400

    # Спектральная плотность и ядро
    DELTA_SWITCH: float = 1e-6
    TRANSPARENCY_TOL: float = 1e-12
    MAX_SPECTRUM_SAMPLES: int = 65537
    SPECTRUM_REFINE_TOL: float = 1e-4
    FILON_MAX_POINTS: int = 32769

    # Параллельные развёртки (joblib)
    N_JOBS: int = 1

    # Логирование
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""


settings = Settings()
