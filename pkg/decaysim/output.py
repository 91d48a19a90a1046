"""
Запись таблиц результатов в CSV.

Каждый файл начинается со строк '#': версия, хэш конфигурации, единицы и
имена колонок. Формат чисел фиксирован, поэтому одинаковая конфигурация
даёт побайтно одинаковый файл.
"""

import io
from pathlib import Path

import pandas as pd

from decaysim import __version__
from decaysim.logger import logger

FLOAT_FORMAT = "%.12e"
UNITS = "reduced c = hbar = eps0 = 1; frequencies in units of omega_A, times in units of 1/Gamma0"


def render_csv(frame: pd.DataFrame, command: str, config_hash: str) -> str:
    """Текст CSV с заголовком из строк '#'."""
    header = [
        f"# decaysim {__version__}",
        f"# command: {command}",
        f"# config_hash: {config_hash}",
        f"# units: {UNITS}",
        f"# columns: {','.join(frame.columns)}",
    ]
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return "\n".join(header) + "\n" + buffer.getvalue()


def write_table(frame: pd.DataFrame, command: str, config_hash: str, path: str | Path) -> None:
    """Пишет таблицу в файл, создавая каталог при необходимости."""
    text = render_csv(frame, command, config_hash)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("💾 Таблица %s записана: %s (%d строк)", command, target, len(frame))


def read_table(path: str | Path) -> pd.DataFrame:
    """Читает таблицу, пропуская строки заголовка."""
    return pd.read_csv(path, comment="#")
