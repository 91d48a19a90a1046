"""
Подкоманды CLI: по одному классу Command на модуль.
"""

from decaysim.commands import audit, decay, eps, rate, spectrum
from decaysim.commands.base import BaseCommand

COMMANDS: dict[str, type[BaseCommand]] = {
    "eps": eps.Command,
    "spectrum": spectrum.Command,
    "rate": rate.Command,
    "decay": decay.Command,
    "audit": audit.Command,
}

__all__ = ["COMMANDS", "BaseCommand"]
