"""
Конфигурация запуска: INI-подобный текст с секциями [section] и строками key = value.

Блоки [material.<name>.oscillator] могут повторяться, каждый задаёт один
лоренцевский член. Неизвестные секции и ключи считаются ошибкой, все
нарушения собираются в один ConfigError со списком (секция, ключ, причина).
Формат описан в docs/config_format.md.
"""

import hashlib
import re
from collections.abc import Iterable
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError

from decaysim.config import settings
from decaysim.exceptions import ConfigError
from decaysim.greens import (
    FreeSpace,
    Geometry,
    HalfSpace,
    HomogeneousBulk,
    Slab,
    SphereCavityCenter,
    Toy1D,
)
from decaysim.numerics import QuadratureSpec, default_quadrature
from decaysim.permittivity import LorentzOscillator, PermittivityModel, lorentz_matching
from decaysim.spectral import AtomConfig

_SECTION = re.compile(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]$")
_MATERIAL = re.compile(r"^material\.([A-Za-z0-9_\-]+)$")
_OSCILLATOR = re.compile(r"^material\.([A-Za-z0-9_\-]+)\.oscillator$")

GeometryKind = Literal["free_space", "bulk", "half_space", "sphere_center", "toy1d"]


class GeometrySettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: GeometryKind = "free_space"
    material: str | None = None
    wall: str | None = None
    z_atom: float | None = Field(default=None, gt=0)
    radius: float | None = Field(default=None, gt=0)
    left: str | None = None
    right: str | None = None
    layers: tuple[tuple[str, PositiveFloat], ...] = ()


class WindowSettings(BaseModel):
    """Окно частот в единицах ω_A."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_min: float = Field(default=0.2, gt=0)
    omega_max: float = Field(default=1.8, gt=0)
    n_samples: int = Field(default=257, ge=16)
    refine_tol: float | None = Field(default=None, gt=0)


class TimeSettings(BaseModel):
    """Горизонт в единицах 1/Γ₀."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_max: float = Field(default=5.0, gt=0)
    n_steps: int = Field(default=2000, ge=2)


class EpsSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    material: str | None = None
    omega_min: float = Field(default=0.2, gt=0)
    omega_max: float = Field(default=5.0, gt=0)
    n_points: int = Field(default=50, ge=2)


class AuditSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_pairs: int = Field(default=100, ge=1)
    n_modes: int = Field(default=4000, ge=100)
    seed: int = 0
    oracle_tolerance: float = Field(default=5e-3, gt=0)
    kk_points: int = Field(default=50, ge=2)


class RunSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    output: str | None = None
    n_jobs: int = Field(default=1, ge=1)


class RunConfig(BaseModel):
    """Проверенная конфигурация запуска."""

    model_config = ConfigDict(frozen=True)

    run: RunSettings = RunSettings()
    geometry_settings: GeometrySettings = GeometrySettings()
    materials: dict[str, PermittivityModel] = {}
    atom: AtomConfig = AtomConfig(omega_a=1.0, gamma0=1e-3)
    window: WindowSettings = WindowSettings()
    time: TimeSettings = TimeSettings()
    eps: EpsSettings = EpsSettings()
    tolerances: QuadratureSpec = QuadratureSpec()
    audit: AuditSettings = AuditSettings()

    @property
    def geometry(self) -> Geometry:
        """Геометрия с подставленными материалами; длины из файла в единицах 1/ω_A."""
        g = self.geometry_settings
        m = self.materials
        unit = 1.0 / self.atom.omega_a
        match g.kind:
            case "free_space":
                return FreeSpace()
            case "bulk":
                return HomogeneousBulk(model=m[g.material])
            case "half_space":
                return HalfSpace(model=m[g.material], z_atom=g.z_atom * unit)
            case "sphere_center":
                return SphereCavityCenter(radius=g.radius * unit, wall=m[g.wall])
        return Toy1D(
            left=m[g.left],
            right=m[g.right],
            layers=tuple(Slab(thickness=d * unit, model=m[name]) for name, d in g.layers),
        )

    @property
    def window_bounds(self) -> tuple[float, float]:
        return self.window.omega_min * self.atom.omega_a, self.window.omega_max * self.atom.omega_a

    @property
    def horizon(self) -> float:
        return self.time.t_max / self.atom.gamma0

    def eps_material(self, name: str | None = None) -> tuple[str, PermittivityModel]:
        """Материал для таблицы ε: явное имя, [eps] material, материал геометрии или первый."""
        if name is not None and name not in self.materials:
            raise ConfigError([("eps", "material", f"unknown material '{name}'")])
        g = self.geometry_settings
        candidates = [name, self.eps.material, g.material, g.wall, g.left, *self.materials]
        for candidate in candidates:
            if candidate and candidate in self.materials:
                return candidate, self.materials[candidate]
        raise ConfigError([("eps", "material", "no material defined in the configuration")])

    def content_hash(self) -> str:
        return hashlib.sha256(serialize_config(self).encode("utf-8")).hexdigest()[:16]


_SIMPLE_SECTIONS: dict[str, type[BaseModel]] = {
    "run": RunSettings,
    "geometry": GeometrySettings,
    "window": WindowSettings,
    "time": TimeSettings,
    "eps": EpsSettings,
    "tolerances": QuadratureSpec,
    "audit": AuditSettings,
}
_ATOM_KEYS = {"omega_a", "dipole", "gamma0"}
_TOLERANCE_KEYS = {"rel_tol", "abs_tol", "max_subdivisions"}
_MATERIAL_KEYS = {"eps", "eps_omega"}
_OSCILLATOR_KEYS = {"omega_t", "omega_p", "gamma"}


def _allowed_keys(section: str) -> set[str] | None:
    if section == "atom":
        return _ATOM_KEYS
    if section == "tolerances":
        return _TOLERANCE_KEYS
    if section in _SIMPLE_SECTIONS:
        return set(_SIMPLE_SECTIONS[section].model_fields)
    if _MATERIAL.match(section):
        return _MATERIAL_KEYS
    if _OSCILLATOR.match(section):
        return _OSCILLATOR_KEYS
    return None


Blocks = list[tuple[str, dict[str, str]]]


def _read_blocks(text: str, issues: list[tuple[str, str, str]]) -> Blocks:
    """Разбивает текст на блоки (секция, {ключ: строка})."""
    blocks: Blocks = []
    seen: set[str] = set()
    current: dict[str, str] | None = None
    section = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        header = _SECTION.match(line)
        if header:
            section = header.group(1)
            if _allowed_keys(section) is None:
                issues.append((section, "", "unknown section"))
                current = None
                continue
            if section in seen and not _OSCILLATOR.match(section):
                issues.append((section, "", "section appears more than once"))
            seen.add(section)
            current = {}
            blocks.append((section, current))
            continue
        if "=" not in line:
            issues.append((section or "<top>", "", f"line {number}: expected 'key = value'"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if current is None:
            if section == "":
                issues.append(("<top>", key, "key outside of any section"))
            continue
        if key not in _allowed_keys(section):
            issues.append((section, key, "unknown key"))
            continue
        if key in current:
            issues.append((section, key, "duplicate key"))
        current[key] = value
    return blocks


def _apply_overrides(blocks: Blocks, overrides: Iterable[str], issues) -> None:
    """Подстановка section.key=value поверх разобранного текста."""
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            issues.append(("override", item, "expected section.key=value"))
            continue
        target, value = (part.strip() for part in item.split("=", 1))
        section, key = target.rsplit(".", 1)
        allowed = _allowed_keys(section)
        if allowed is None or key not in allowed:
            issues.append((section, key, "unknown override target"))
            continue
        matches = [fields for name, fields in blocks if name == section]
        if len(matches) > 1:
            issues.append((section, key, "ambiguous override of a repeated section"))
            continue
        if matches:
            matches[0][key] = value
        else:
            blocks.append((section, {key: value}))


def _issues_from(section: str, error: ValidationError) -> list[tuple[str, str, str]]:
    return [
        (section, ".".join(str(p) for p in err["loc"]) or "", err["msg"]) for err in error.errors()
    ]


def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_complex(value: str) -> complex:
    return complex(value.replace(" ", "").replace("i", "j"))


def _build_materials(blocks: Blocks, issues) -> dict[str, PermittivityModel]:
    oscillators: dict[str, list[LorentzOscillator]] = {}
    matched: dict[str, dict[str, str]] = {}
    counters: dict[str, int] = {}
    for section, fields in blocks:
        if m := _OSCILLATOR.match(section):
            name = m.group(1)
            index = counters.get(name, 0)
            counters[name] = index + 1
            label = f"material.{name}.oscillator[{index}]"
            try:
                oscillators.setdefault(name, []).append(LorentzOscillator(**fields))
            except ValidationError as exc:
                issues.extend(_issues_from(label, exc))
        elif m := _MATERIAL.match(section):
            matched[m.group(1)] = fields

    materials: dict[str, PermittivityModel] = {}
    for name in sorted(set(oscillators) | set(matched)):
        fields = matched.get(name, {})
        if fields and name in oscillators:
            issues.append((f"material.{name}", "eps", "use either eps/eps_omega or oscillator blocks"))
            continue
        if fields:
            missing = sorted(_MATERIAL_KEYS - set(fields))
            if missing:
                for key in missing:
                    issues.append((f"material.{name}", key, "Field required"))
                continue
            try:
                materials[name] = lorentz_matching(
                    _parse_complex(fields["eps"]), float(fields["eps_omega"])
                )
            except ValueError as exc:
                issues.append((f"material.{name}", "eps", str(exc)))
            continue
        materials[name] = PermittivityModel(oscillators=tuple(oscillators.get(name, ())))
    return materials


_REQUIRED_BY_KIND: dict[str, tuple[str, ...]] = {
    "free_space": (),
    "bulk": ("material",),
    "half_space": ("material", "z_atom"),
    "sphere_center": ("radius", "wall"),
    "toy1d": ("left", "right"),
}


def _check_geometry(geometry: GeometrySettings, materials, issues) -> None:
    for key in _REQUIRED_BY_KIND[geometry.kind]:
        if getattr(geometry, key) is None:
            issues.append(("geometry", key, f"required for kind '{geometry.kind}'"))
    references = [("material", geometry.material), ("wall", geometry.wall)]
    references += [("left", geometry.left), ("right", geometry.right)]
    references += [("layers", name) for name, _ in geometry.layers]
    for key, name in references:
        if name is not None and name not in materials:
            issues.append(("geometry", key, f"unknown material '{name}'"))


def _env_defaults(section: str) -> dict[str, object]:
    """Значения из окружения (.env), если в файле их нет."""
    if section == "tolerances":
        return default_quadrature().model_dump(exclude={"oscillation_period_hint"})
    if section == "run":
        return {"n_jobs": settings.N_JOBS}
    return {}


def parse_config(text: str, overrides: Iterable[str] = ()) -> RunConfig:
    """
    Разбирает и проверяет текст конфигурации.

    Args:
        text: Содержимое файла
        overrides: Строки section.key=value из командной строки

    Raises:
        ConfigError: со списком всех найденных нарушений
    """
    issues: list[tuple[str, str, str]] = []
    blocks = _read_blocks(text, issues)
    _apply_overrides(blocks, overrides, issues)
    sections = {name: fields for name, fields in blocks}

    values: dict[str, BaseModel] = {}
    for section, model in _SIMPLE_SECTIONS.items():
        fields: dict[str, object] = dict(_env_defaults(section))
        fields.update(sections.get(section, {}))
        if section == "geometry" and "layers" in fields:
            layers = []
            for item in _split_list(str(fields["layers"])):
                name, _, thickness = item.partition(":")
                layers.append((name.strip(), thickness.strip()))
            fields["layers"] = layers
        try:
            values[section] = model(**fields)
        except ValidationError as exc:
            issues.extend(_issues_from(section, exc))

    atom_fields: dict[str, object] = {"omega_a": 1.0, "gamma0": 1e-3}
    atom_fields.update(sections.get("atom", {}))
    if "dipole" in atom_fields:
        atom_fields["dipole_dir"] = _split_list(str(atom_fields.pop("dipole")))
    atom = None
    try:
        atom = AtomConfig(**atom_fields)
    except ValidationError as exc:
        issues.extend(
            ("atom", "dipole" if key == "dipole_dir" else key, reason)
            for _, key, reason in _issues_from("atom", exc)
        )

    materials = _build_materials(blocks, issues)
    if "geometry" in values:
        _check_geometry(values["geometry"], materials, issues)
    if "eps" in values:
        eps_material = values["eps"].material
        if eps_material is not None and eps_material not in materials:
            issues.append(("eps", "material", f"unknown material '{eps_material}'"))
    if "window" in values and atom is not None:
        window = values["window"]
        if not window.omega_min < 1.0 < window.omega_max:
            issues.append(("window", "omega_min", "window must enclose ω_A (omega_min < 1 < omega_max)"))
    if "eps" in values and values["eps"].omega_min >= values["eps"].omega_max:
        issues.append(("eps", "omega_min", "must be below omega_max"))

    if issues:
        raise ConfigError(issues)
    return RunConfig(
        run=values["run"],
        geometry_settings=values["geometry"],
        materials=materials,
        atom=atom,
        window=values["window"],
        time=values["time"],
        eps=values["eps"],
        tolerances=values["tolerances"],
        audit=values["audit"],
    )


def load_config(path: str | Path, overrides: Iterable[str] = ()) -> RunConfig:
    """Читает файл конфигурации и разбирает его."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([("<file>", str(path), f"cannot read: {exc.strerror}")]) from exc
    return parse_config(text, overrides)


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _dump(section: str, model: BaseModel, skip: Iterable[str] = ()) -> list[str]:
    lines = [f"[{section}]"]
    for key, value in model.model_dump().items():
        if key in skip or value is None:
            continue
        if key == "layers":
            if not value:
                continue
            value = ", ".join(f"{name}:{thickness!r}" for name, thickness in value)
        lines.append(f"{key} = {_fmt(value)}")
    return lines


def serialize_config(cfg: RunConfig) -> str:
    """Каноническая запись конфигурации; parse_config(serialize_config(c)) == c."""
    lines = _dump("run", cfg.run)
    lines += ["", *_dump("geometry", cfg.geometry_settings)]
    atom = cfg.atom
    lines += [
        "",
        "[atom]",
        f"omega_a = {atom.omega_a!r}",
        "dipole = " + ", ".join(repr(c) for c in atom.dipole_dir),
        f"gamma0 = {atom.gamma0!r}",
    ]
    for section, model in (
        ("window", cfg.window),
        ("time", cfg.time),
        ("eps", cfg.eps),
    ):
        lines += ["", *_dump(section, model)]
    lines += ["", *_dump("tolerances", cfg.tolerances, skip=("oscillation_period_hint",))]
    lines += ["", *_dump("audit", cfg.audit)]
    for name in sorted(cfg.materials):
        if not cfg.materials[name].oscillators:
            lines += ["", f"[material.{name}]"]
        for osc in cfg.materials[name].oscillators:
            lines += [
                "",
                f"[material.{name}.oscillator]",
                f"omega_t = {osc.omega_t!r}",
                f"omega_p = {osc.omega_p!r}",
                f"gamma = {osc.gamma!r}",
            ]
    return "\n".join(lines) + "\n"
