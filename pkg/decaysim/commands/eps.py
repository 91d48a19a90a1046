"""
Команда eps: таблица ε′, ε″ и невязок Крамерса–Кронига.
"""

import numpy as np
import pandas as pd

from decaysim.commands.base import BaseCommand
from decaysim.logger import logger
from decaysim.permittivity import eval_permittivity, kk_residuals


class Command(BaseCommand):
    """Табулирует диэлектрическую функцию материала.

    Использование:
        decaysim eps --config configs/sphere_bandgap.ini --material bandgap
    """

    name = "eps"
    help = "Таблица ε′(ω), ε″(ω) и невязок ККР"

    def add_arguments(self, parser):
        parser.add_argument(
            "--material", default=None, help="Имя материала (по умолчанию из [eps] или геометрии)"
        )

    def handle(self, cfg, options):
        name, model = cfg.eps_material(options.material)
        omega_a = cfg.atom.omega_a
        scaled = np.linspace(cfg.eps.omega_min, cfg.eps.omega_max, cfg.eps.n_points)
        omegas = scaled * omega_a
        eps = eval_permittivity(model, omegas)
        real_res, imag_res = kk_residuals(model, omegas, cfg.tolerances, cfg.run.n_jobs)
        logger.info("🧪 Материал %s: %d точек", name, scaled.size)
        frame = pd.DataFrame(
            {
                "omega": scaled,
                "eps_re": np.real(eps),
                "eps_im": np.imag(eps),
                "kk_re_residual": real_res,
                "kk_im_residual": imag_res,
            }
        )
        self.emit(frame, cfg, options)
        return 0
