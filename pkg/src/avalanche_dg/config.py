"""Run configuration: TOML loading, validation and the four chute presets.

A config file has the sections ``[physical]``, ``[numerical]``, ``[initial]``
and ``[output]``.  Angles in files are given in degrees.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .physics import ParameterError, PhysicalParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NumericalParams:
    length: float = 30.0
    n_cells: int = 256
    degree: int = 2
    dt: float = 0.001
    t_end: float = 48.0
    gamma: float = 0.5
    h_semi: float = 1e-6
    h_eps: float = 1e-10
    u_stop: float = 1e-6
    hold_resting: bool = False
    strict_cfl: bool = False
    record_every: int = 100


@dataclass(frozen=True)
class InitialParams:
    shape: str = "circle"
    r0: float = 1.85
    x0: float = 4.0


@dataclass(frozen=True)
class OutputParams:
    snapshot_times: tuple[float, ...] = (0.0, 12.0, 24.0, 36.0, 48.0)
    directory: str = "output"


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalParams
    numerical: NumericalParams = NumericalParams()
    initial: InitialParams = InitialParams()
    output: OutputParams = OutputParams()
    name: str = "run"

    def __post_init__(self):
        num = self.numerical
        if num.degree != 2:
            raise ConfigError(f"numerical.degree: only 2 is supported, got {num.degree}")
        if num.n_cells < 3:
            raise ConfigError("numerical.n_cells must be at least 3")
        for key in ("length", "dt", "t_end", "r0"):
            section = self.initial if key == "r0" else num
            if not getattr(section, key) > 0:
                raise ConfigError(f"{key} must be positive")
        if not 0.5 <= num.gamma <= 1.0:
            raise ConfigError("numerical.gamma must lie in [0.5, 1]")
        if not 0.0 < num.h_eps < num.h_semi:
            raise ConfigError("need 0 < h_eps < h_semi")
        if num.record_every < 1:
            raise ConfigError("numerical.record_every must be at least 1")
        if self.initial.shape not in INITIAL_SHAPES:
            raise ConfigError(f"initial.shape must be one of {sorted(INITIAL_SHAPES)}")
        snaps = self.output.snapshot_times
        if list(snaps) != sorted(snaps) or any(t < 0 or t > num.t_end for t in snaps):
            raise ConfigError("output.snapshot_times must be sorted and lie in [0, t_end]")

    def with_overrides(self, **numerical) -> "RunConfig":
        """Copy with numerical fields replaced; snapshot times beyond t_end are dropped."""
        num = replace(self.numerical, **numerical)
        snaps = tuple(t for t in self.output.snapshot_times if t <= num.t_end)
        return replace(self, numerical=num, output=replace(self.output, snapshot_times=snaps))


INITIAL_SHAPES = {"circle", "parabola"}

PRESET_ANGLES = {
    1: (35.0, 30.0, 30.0),
    2: (35.0, 30.0, 23.0),
    3: (35.0, 37.0, 30.0),
    4: (40.0, 30.0, 30.0),
}


def preset(case: int) -> RunConfig:
    """Chute case I-IV as ``RunConfig`` (angles: inclination, internal, bed)."""
    try:
        zeta0, phi, delta = PRESET_ANGLES[case]
    except KeyError:
        raise ConfigError(f"unknown case {case!r}; choose from {sorted(PRESET_ANGLES)}") from None
    return RunConfig(PhysicalParams.from_degrees(zeta0, phi, delta), name=f"case{case}")


_REQUIRED_PHYSICAL = ("zeta0", "phi", "delta")
_ANGLES = {"zeta0", "phi", "delta"}


def _build(cls, data: dict, section: str, convert=None):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in data.items():
        if convert is not None:
            value = convert(key, value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except ParameterError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from exc


def config_from_dict(doc: dict, name: str = "run") -> RunConfig:
    phys = doc.get("physical", {})
    missing = [f"physical.{k}" for k in _REQUIRED_PHYSICAL if k not in phys]
    if missing:
        raise ConfigError(f"missing required fields: {', '.join(missing)}")
    unknown_sections = set(doc) - {"physical", "numerical", "initial", "output", "name"}
    if unknown_sections:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown_sections))}")

    def angle(key, value):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"physical.{key} must be a number, got {value!r}")
        return math.radians(value) if key in _ANGLES else float(value)

    def numeric(key, value):
        if key in ("n_cells", "degree", "record_every"):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"numerical.{key} must be an integer, got {value!r}")
            return value
        if key in ("strict_cfl", "hold_resting"):
            if not isinstance(value, bool):
                raise ConfigError(f"numerical.{key} must be a boolean, got {value!r}")
            return value
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"numerical.{key} must be a number, got {value!r}")
        return float(value)

    def output(key, value):
        if key == "snapshot_times":
            return tuple(float(t) for t in value)
        return str(value)

    numerical = _build(NumericalParams, doc.get("numerical", {}), "numerical", numeric)
    out_doc = dict(doc.get("output", {}))
    if "snapshot_times" not in out_doc:
        # default figure times, cut to the run length
        out_doc["snapshot_times"] = [t for t in OutputParams.snapshot_times if t <= numerical.t_end]
    return RunConfig(
        physical=_build(PhysicalParams, phys, "physical", angle),
        numerical=numerical,
        initial=_build(InitialParams, doc.get("initial", {}), "initial"),
        output=_build(OutputParams, out_doc, "output", output),
        name=str(doc.get("name", name)),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(doc, name=path.stem)
