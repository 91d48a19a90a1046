"""
Точка входа CLI:

    decaysim <subcommand> --config <path> [--out <path>] [--override section.key=value ...]

Коды выхода: 0 успех, 1 ошибка использования или конфигурации,
2 численная несходимость, 3 провал проверок audit.
"""

import argparse
import sys
from collections.abc import Sequence
from typing import TextIO

from pydantic import ValidationError

from decaysim import __version__
from decaysim.commands import COMMANDS
from decaysim.config import settings
from decaysim.exceptions import (
    ConfigError,
    ContractViolation,
    ConvergenceError,
    GeometryError,
    IntegrandError,
)
from decaysim.logger import configure_logging, logger
from decaysim.runconfig import load_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICS = 2
EXIT_AUDIT = 3


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse завершает процесс с кодом 2; здесь ошибка использования даёт код 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Путь к файлу конфигурации (.ini)")
    common.add_argument("--out", default=None, help="Файл для CSV (по умолчанию stdout)")
    common.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Переопределить значение конфигурации (можно повторять)",
    )
    common.add_argument("--verbose", action="store_true", help="Подробный лог (DEBUG)")

    parser = _ArgumentParser(
        prog="decaysim", description="Спонтанный распад двухуровневого атома у диэлектриков"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, command_class in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=command_class.help)
        command_class().add_arguments(sub)
    return parser


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    """Разбирает аргументы, загружает конфигурацию и запускает подкоманду."""
    parser = build_parser()
    try:
        options = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE

    if options.verbose:
        configure_logging("DEBUG")

    command = COMMANDS[options.command](stdout=stdout)
    try:
        cfg = load_config(options.config, options.override)
        logger.info(
            "🚀 %s %s [%s]: %s (config %s)",
            settings.APP_NAME,
            settings.APP_VERSION,
            settings.ENVIRONMENT,
            options.command,
            cfg.content_hash(),
        )
        return command.handle(cfg, options)
    except ConfigError as exc:
        logger.error("❌ Ошибка конфигурации:\n%s", exc)
        return EXIT_USAGE
    except ValidationError as exc:
        logger.error("❌ Недопустимое значение в конфигурации:\n%s", exc)
        return EXIT_USAGE
    except (ContractViolation, GeometryError) as exc:
        logger.error("❌ Недопустимый запрос: %s", exc)
        return EXIT_USAGE
    except (ConvergenceError, IntegrandError) as exc:
        logger.error("❌ Численная ошибка: %s", exc)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
