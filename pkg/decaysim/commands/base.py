"""
Базовый класс подкоманды.
"""

import argparse
import sys
from typing import TextIO

import pandas as pd

from decaysim.output import render_csv, write_table
from decaysim.runconfig import RunConfig


class BaseCommand:
    """Подкоманда: свои аргументы и обработчик, возвращающий код выхода.

    Таблицы пишутся в --out (или [run] output, или stdout),
    служебные сообщения идут в лог.
    """

    name = ""
    help = ""

    def __init__(self, stdout: TextIO | None = None):
        self.stdout = stdout or sys.stdout

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Дополнительные аргументы подкоманды."""

    def handle(self, cfg: RunConfig, options: argparse.Namespace) -> int:
        raise NotImplementedError

    def write(self, text: str) -> None:
        self.stdout.write(text if text.endswith("\n") else text + "\n")

    def emit(self, frame: pd.DataFrame, cfg: RunConfig, options: argparse.Namespace) -> None:
        path = getattr(options, "out", None) or cfg.run.output
        if path is None:
            self.stdout.write(render_csv(frame, self.name, cfg.content_hash()))
            return
        write_table(frame, self.name, cfg.content_hash(), path)
