"""Run configuration: YAML file or named preset, validated before any computation.

Frequencies are given in THz and converted to s^-1 here; distances are in
metres and the temperature in kelvin.

Example::

    plate1: {model: weyl, eps_w: 1.0, omega_b_THz: 3000}
    plate2: {model: weyl, eps_w: 1.0, omega_b_THz: 3000}
    orientation: parallel
    temperature: 200
    distances: {min: 5.0e-8, max: 1.0e-6, count: 40, spacing: log}
    tolerance: 1.0e-6
    output: {path: out.csv, format: csv}
"""
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .lifshitz import PlateSystem
from .materials import (IdealPlate, IsotropicParams, MagnetoPlasmaParams, SiliconParams,
                        WeylParams)
from .presets import preset
from .quantities import DEFAULT_XI0_FRACTION, thz

__all__ = ["RunConfig", "load_config", "config_from_preset", "parse_config"]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SiliconBlock(_Block):
    model: Literal["silicon"]
    eps_inf: float = 1.035
    eps_0s: float = 11.87
    omega_0_THz: float = 6600.0
    omega_p_THz: float = 361.51
    gamma_THz: float = 78.68

    def material(self):
        return SiliconParams(self.eps_inf, self.eps_0s, thz(self.omega_0_THz),
                             thz(self.omega_p_THz), thz(self.gamma_THz))


class MagnetoPlasmaBlock(_Block):
    model: Literal["magneto_plasma"]
    eps_b: float
    omega_p_THz: float
    omega_c_THz: float
    gamma_THz: float = 0.0

    def material(self):
        return MagnetoPlasmaParams(self.eps_b, thz(self.omega_p_THz),
                                   thz(self.omega_c_THz), thz(self.gamma_THz))


class WeylBlock(_Block):
    model: Literal["weyl"]
    eps_w: float
    omega_b_THz: Optional[float] = None
    node_separation_per_angstrom: Optional[float] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.omega_b_THz is None) == (self.node_separation_per_angstrom is None):
            raise ValueError("give exactly one of omega_b_THz or node_separation_per_angstrom")
        return self

    def material(self):
        if self.omega_b_THz is not None:
            return WeylParams(self.eps_w, thz(self.omega_b_THz))
        return WeylParams.from_node_separation(self.eps_w, self.node_separation_per_angstrom * 1e10)


class IsotropicBlock(_Block):
    model: Literal["isotropic"]
    eps: float

    def material(self):
        return IsotropicParams(self.eps)


class IdealBlock(_Block):
    model: Literal["perfect_conductor", "infinitely_permeable"]

    def material(self):
        return IdealPlate(self.model)


PlateBlock = Annotated[
    Union[SiliconBlock, MagnetoPlasmaBlock, WeylBlock, IsotropicBlock, IdealBlock],
    Field(discriminator="model"),
]


class DistanceSpec(_Block):
    min: float = Field(gt=0)
    max: float = Field(gt=0)
    count: int = Field(ge=1)
    spacing: Literal["linear", "log"] = "log"

    @model_validator(mode="after")
    def _ordered(self):
        if self.max < self.min:
            raise ValueError("max must be >= min")
        return self

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


class OutputSpec(_Block):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"


class IntegrandSpec(_Block):
    n: int = Field(default=1, ge=0)
    distance: float = Field(gt=0)
    k_max_over_xi1: float = Field(default=100.0, gt=0)
    count: int = Field(default=2000, ge=2)


class RunConfig(_Block):
    plate1: PlateBlock
    plate2: PlateBlock
    orientation: Literal["parallel", "antiparallel"] = "parallel"
    temperature: float = Field(default=200.0, gt=0)
    distances: Union[List[float], DistanceSpec] = Field(default_factory=list)
    tolerance: float = Field(default=1e-6, gt=0, lt=1)
    output: OutputSpec = OutputSpec()
    d_range: Optional[Tuple[float, float]] = None
    points_per_decade: int = Field(default=64, ge=2)
    xi0_fraction: float = Field(default=DEFAULT_XI0_FRACTION, gt=0, lt=1)
    integrand: Optional[IntegrandSpec] = None

    @field_validator("distances")
    @classmethod
    def _positive(cls, v):
        if isinstance(v, list) and any(not d > 0 for d in v):
            raise ValueError("distances must be positive")
        return v

    @field_validator("d_range")
    @classmethod
    def _range(cls, v):
        if v is not None and not 0 < v[0] < v[1]:
            raise ValueError("d_range must satisfy 0 < min < max")
        return v

    def distance_values(self):
        if isinstance(self.distances, DistanceSpec):
            return self.distances.values()
        return np.sort(np.asarray(self.distances, dtype=float))

    def system(self):
        return PlateSystem.from_materials(
            self.plate1.material(), self.plate2.material(), self.orientation,
            temperature=self.temperature, xi0_fraction=self.xi0_fraction,
        )


def _line_of(node, loc):
    """Best-effort 1-based line of the YAML node at ``loc``."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = [v for k, v in node.value if k.value == key]
            if not match:
                break
            node = match[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            continue
        line = node.start_mark.line + 1
    return line


def _raise(exc, root=None, source="config"):
    lines = []
    for err in exc.errors():
        loc = tuple(err["loc"])
        where = ".".join(str(p) for p in loc) or "<root>"
        line = _line_of(root, loc) if root is not None else None
        at = f"{source}:{line}: " if line else f"{source}: "
        lines.append(f"{at}{where}: {err['msg']}")
    raise ConfigError("invalid configuration\n  " + "\n  ".join(lines)) from None


def parse_config(data, *, source="config", root=None):
    """Validate a mapping into a :class:`RunConfig`, raising ConfigError."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        _raise(exc, root, source)


def load_config(path, overrides=None):
    """Read and validate a YAML configuration file.

    ``overrides`` (a mapping) is merged over the top-level keys before
    validation.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigError(f"{where}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        data = {}
    if overrides and isinstance(data, dict):
        data = {**data, **overrides}
    return parse_config(data, source=str(path), root=root)


def config_from_preset(name, overrides=None):
    try:
        data = preset(name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    if overrides:
        data.update(overrides)
    return parse_config(data, source=f"preset {name}")
