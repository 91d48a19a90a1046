# pylint: disable=import-error
"""
Логирование пакета.

Результаты команд печатаются в stdout, поэтому все сообщения логгера
"decaysim" идут в stderr и, если задан LOG_FILE, в ротационный файл.
Уровень по умолчанию из LOG_LEVEL; CLI перенастраивает логгер через
configure_logging (флаг --verbose).
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from decaysim.config import settings

LOGGER_NAME = "decaysim"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 10 МБ, 5 архивов
MAX_LOG_BYTES = 10 * 1024 * 1024
LOG_BACKUPS = 5


def _file_handler(path: str | Path) -> logging.Handler | None:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        return RotatingFileHandler(
            str(target), maxBytes=MAX_LOG_BYTES, backupCount=LOG_BACKUPS, encoding="utf-8"
        )
    except OSError as exc:
        sys.stderr.write(f"⚠️ Не удалось открыть файл логов {target}: {exc}\n")
        return None


def configure_logging(level: str | None = None, log_file: str | Path | None = None) -> logging.Logger:
    """
    (Пере)настраивает логгер пакета.

    Args:
        level: DEBUG, INFO, WARNING ...; по умолчанию settings.LOG_LEVEL
        log_file: Файл логов; по умолчанию settings.LOG_FILE (пусто = только stderr)

    Returns:
        Логгер "decaysim"
    """
    value = getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO)
    pkg_logger = logging.getLogger(LOGGER_NAME)
    pkg_logger.setLevel(value)
    pkg_logger.propagate = False

    for handler in list(pkg_logger.handlers):
        pkg_logger.removeHandler(handler)
        handler.close()

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    path = log_file or settings.LOG_FILE
    if path and (fh := _file_handler(path)) is not None:
        handlers.append(fh)

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    for handler in handlers:
        handler.setLevel(value)
        handler.setFormatter(formatter)
        pkg_logger.addHandler(handler)
    return pkg_logger


# ✅ Логгер пакета
logger = configure_logging()
