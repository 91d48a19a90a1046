"""
Команда decay: траектория C_u(t) и марковская опора.
"""

import numpy as np
import pandas as pd

from decaysim.commands.base import BaseCommand
from decaysim.dynamics import TimeGrid, markov_limit, markov_trajectory, solve_volterra
from decaysim.logger import logger
from decaysim.spectral import build_spectral_density, kernel_table


class Command(BaseCommand):
    """Решает интегральное уравнение для C_u(t) на горизонте [time] t_max/Γ₀.

    Время в таблице в единицах 1/Γ₀; рядом колонка |C_u|² марковского предела.
    """

    name = "decay"
    help = "Траектория C_u(t) с марковской опорой"

    def handle(self, cfg, options):
        atom = cfg.atom
        grid = TimeGrid(t_max=cfg.horizon, n_steps=cfg.time.n_steps)
        sd = build_spectral_density(
            cfg.geometry,
            atom,
            cfg.window_bounds,
            cfg.window.n_samples,
            cfg.tolerances,
            cfg.window.refine_tol,
            cfg.run.n_jobs,
        )
        table = kernel_table(sd, atom, grid.dt, grid.n_steps, cfg.tolerances, cfg.run.n_jobs)
        trajectory = solve_volterra(table, grid)
        limit = markov_limit(sd, atom, cfg.tolerances)
        reference = markov_trajectory(grid, limit.gamma, limit.delta_omega)

        deviation = float(np.max(np.abs(trajectory.population - reference.population)))
        logger.info("📉 Максимальное отклонение от марковского предела: %.3g", deviation)

        frame = trajectory.to_frame()
        frame["t"] = frame["t"] * atom.gamma0
        frame = pd.concat(
            [frame, pd.DataFrame({"markov_population": reference.population})], axis=1
        )
        self.emit(frame, cfg, options)
        return 0
