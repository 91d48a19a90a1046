"""
Команда rate: Γ/Γ₀ и сдвиг линии в марковском пределе.
"""

from decaysim.commands.base import BaseCommand
from decaysim.dynamics import markov_limit
from decaysim.spectral import build_spectral_density, purcell_factor


class Command(BaseCommand):
    """Печатает Γ/Γ₀ с шестью знаками и δω/Γ₀.

    Для Γ используется прямое значение S(ω_A), сдвиг линии требует
    спектральной плотности на всём окне.
    """

    name = "rate"
    help = "Скорость распада Γ/Γ₀ и сдвиг δω (марковский предел)"

    def add_arguments(self, parser):
        parser.add_argument(
            "--no-shift", action="store_true", help="Не считать δω (только Γ/Γ₀)"
        )

    def handle(self, cfg, options):
        atom = cfg.atom
        ratio = purcell_factor(cfg.geometry, atom, cfg.tolerances)
        self.write(f"gamma_ratio = {ratio:.6f}")
        if options.no_shift:
            return 0
        sd = build_spectral_density(
            cfg.geometry,
            atom,
            cfg.window_bounds,
            cfg.window.n_samples,
            cfg.tolerances,
            cfg.window.refine_tol,
            cfg.run.n_jobs,
        )
        limit = markov_limit(sd, atom, cfg.tolerances)
        self.write(f"delta_omega = {limit.delta_omega / atom.gamma0:.6e}")
        return 0
