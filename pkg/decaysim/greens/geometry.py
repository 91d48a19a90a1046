"""Описание геометрий и образец тензора Грина."""

from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from decaysim.permittivity import PermittivityModel, eval_permittivity, principal_root


class FreeSpace(BaseModel):
    """Вакуум без тел."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["free_space"] = "free_space"


class HomogeneousBulk(BaseModel):
    """Однородная среда; Im G в точке атома только в окне прозрачности."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["bulk"] = "bulk"
    model: PermittivityModel


class HalfSpace(BaseModel):
    """Полупространство z < 0 из среды, атом в вакууме на высоте z_atom."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["half_space"] = "half_space"
    model: PermittivityModel
    z_atom: float = Field(gt=0)


class SphereCavityCenter(BaseModel):
    """Сферическая полость радиуса R, стенка до бесконечности, атом в центре."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sphere_center"] = "sphere_center"
    radius: float = Field(gt=0)
    wall: PermittivityModel


class Slab(BaseModel):
    """Конечный слой одномерной модели."""

    model_config = ConfigDict(frozen=True)

    thickness: float = Field(gt=0)
    model: PermittivityModel


class Toy1D(BaseModel):
    """
    Одномерная слоистая модель: полубесконечные среды left (x < 0) и right,
    между ними слои, начиная с x = 0.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["toy1d"] = "toy1d"
    left: PermittivityModel
    layers: tuple[Slab, ...] = ()
    right: PermittivityModel

    @property
    def interfaces(self) -> list[float]:
        """Координаты границ 0 = x_0 < x_1 < ... < x_N."""
        edges = [0.0]
        for slab in self.layers:
            edges.append(edges[-1] + slab.thickness)
        return edges

    @property
    def regions(self) -> list[PermittivityModel]:
        """Модели по областям слева направо: left, слои..., right."""
        return [self.left, *(slab.model for slab in self.layers), self.right]

    def region_index(self, x: float) -> int:
        """Номер области точки x (0: левая полубесконечная среда)."""
        edges = self.interfaces
        if x < edges[0]:
            return 0
        for j in range(len(self.layers)):
            if x < edges[j + 1]:
                return j + 1
        return len(self.layers) + 1


Geometry = Annotated[
    FreeSpace | HomogeneousBulk | HalfSpace | SphereCavityCenter | Toy1D,
    Field(discriminator="kind"),
]


class GreenSample(BaseModel):
    """Тензор Грина G(r, r′, ω) размера 3×3."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    r: np.ndarray
    r_prime: np.ndarray
    omega: float


def wavenumber(model: PermittivityModel, omega: float) -> complex:
    """
    Волновое число среды k = ω√ε с веткой Im k ≥ 0.

    Для отрицательных ω это даёт k(−ω) = −k(ω)*, что и нужно для проверки
    сопряжения.
    """
    return principal_root(omega**2 * eval_permittivity(model, omega))
