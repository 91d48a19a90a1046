"""
Команда audit: численные проверки с отметкой pass/fail.
"""

from decaysim.audit import run_audit
from decaysim.commands.base import BaseCommand


class Command(BaseCommand):
    """Прогоняет набор проверок; код выхода 3, если хоть одна не прошла."""

    name = "audit"
    help = "Набор численных проверок (взаимность, сопряжение, ККР, оракул ...)"

    def handle(self, cfg, options):
        results = run_audit(cfg)
        for check in results:
            status = "PASS" if check.passed else "FAIL"
            line = f"{status}  {check.name:<22} value={check.value:.3e}  threshold={check.threshold:.3e}"
            if check.detail:
                line += f"  ({check.detail})"
            self.write(line)
        failed = [check.name for check in results if not check.passed]
        if failed:
            self.write(f"❌ Не прошли: {', '.join(failed)}")
            return 3
        self.write(f"✅ Все проверки пройдены ({len(results)})")
        return 0
