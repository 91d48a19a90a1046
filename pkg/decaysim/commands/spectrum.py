"""
Команда spectrum: таблица S(ω) = Γ(ω)/Γ₀ на окне.
"""

import pandas as pd

from decaysim.commands.base import BaseCommand
from decaysim.spectral import build_spectral_density


class Command(BaseCommand):
    """Табулирует нормированную спектральную плотность на сетке окна."""

    name = "spectrum"
    help = "Таблица S(ω) на частотном окне"

    def handle(self, cfg, options):
        sd = build_spectral_density(
            cfg.geometry,
            cfg.atom,
            cfg.window_bounds,
            cfg.window.n_samples,
            cfg.tolerances,
            cfg.window.refine_tol,
            cfg.run.n_jobs,
        )
        frame = pd.DataFrame(
            {"omega": sd.omega_grid / cfg.atom.omega_a, "s": sd.s_values}
        )
        self.emit(frame, cfg, options)
        return 0
