"""Run a configured avalanche simulation and write its outputs."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import physics
from .config import InitialParams, RunConfig
from .dg import Discretization, Mesh, project_initial
from .geometry import to_physical
from .limiter import LimiterParams
from .stopping import CellFlags, StoppingParams, Wetness
from .timestep import Stepper, TimeParams

log = logging.getLogger(__name__)

# "at rest" threshold on max |u| used in summaries
REST_SPEED = 1e-3

SNAPSHOT_COLUMNS = ("x", "h", "u", "mstop", "wet", "xb", "yb", "surf_x", "surf_y")


def initial_depth(init: InitialParams):
    """Depth profile of the released pile as a vectorised function."""
    if init.shape == "circle":
        return lambda x: np.sqrt(np.maximum(0.0, init.r0**2 - (x - init.x0) ** 2))
    if init.shape == "parabola":
        return lambda x: np.maximum(0.0, init.r0 * (1.0 - ((x - init.x0) / init.r0) ** 2))
    raise ValueError(f"unknown initial shape {init.shape!r}")


@dataclass
class RunSummary:
    name: str
    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    max_depth: list = field(default_factory=list)
    max_speed: list = field(default_factory=list)
    front: list = field(default_factory=list)
    cfl_max: float = 0.0
    clamped_mass: float = 0.0
    wall_time: float = 0.0
    snapshots: dict = field(default_factory=dict)

    def record(self, t: float, stats: dict) -> None:
        self.times.append(t)
        self.mass.append(stats["mass"])
        self.max_depth.append(stats["max_depth"])
        self.max_speed.append(stats["max_speed"])
        self.front.append(stats["front"])

    def at(self, series: str, t: float) -> float:
        """Value of a series at the recorded time closest to ``t``."""
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return getattr(self, series)[i]

    def steady_since(self, speed: float = REST_SPEED):
        """Earliest recorded time after which max |u| stays below ``speed``."""
        moving = [t for t, s in zip(self.times, self.max_speed) if s >= speed]
        if not moving:
            return self.times[0] if self.times else None
        later = [t for t in self.times if t > moving[-1]]
        return later[0] if later else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["steady_since"] = self.steady_since()
        return d

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def read(cls, path) -> "RunSummary":
        d = json.loads(Path(path).read_text())
        d.pop("steady_since", None)
        return cls(**d)


def field_stats(fld: np.ndarray, flags: CellFlags, mesh: Mesh, params: physics.PhysicalParams) -> dict:
    hbar = fld[0, 0]
    ubar = physics.velocity(hbar, fld[1, 0])
    wet = np.flatnonzero(flags.wetness == Wetness.WET)
    if wet.size:
        front = float(to_physical(mesh.centers[wet[-1]], 0.0, params).x_b)
    else:
        front = float("nan")
    return {
        "mass": float(np.sum(hbar * mesh.widths)),
        "max_depth": float(hbar.max()),
        "max_speed": float(np.abs(ubar).max()),
        "front": front,
    }


def snapshot_table(fld: np.ndarray, flags: CellFlags, mesh: Mesh, params: physics.PhysicalParams) -> np.ndarray:
    """Rows of ``SNAPSHOT_COLUMNS`` for every cell."""
    x = mesh.centers
    hbar = fld[0, 0]
    ubar = physics.velocity(hbar, fld[1, 0])
    pt = to_physical(x, hbar, params)
    return np.column_stack(
        [x, hbar, ubar, flags.m_stop, flags.wetness, pt.x_b, pt.y_b, pt.x_b + pt.h_xb, pt.y_b + pt.h_yb]
    )


def write_snapshot(fld, flags, t, mesh, params, path) -> Path:
    """CSV with one header row and one row per cell, at full precision.

    The time is not stored in the file; the run summary maps times to files.
    """
    path = Path(path)
    table = snapshot_table(fld, flags, mesh, params)
    fmt = ["%.17g", "%.17g", "%.17g", "%d", "%d", "%.17g", "%.17g", "%.17g", "%.17g"]
    try:
        np.savetxt(path, table, delimiter=",", header=",".join(SNAPSHOT_COLUMNS), fmt=fmt, comments="")
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc}") from exc
    return path


def read_snapshot(path) -> dict:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(SNAPSHOT_COLUMNS)}


class Simulation:
    """Owns the field and stepper of one run."""

    def __init__(self, config: RunConfig, initial_field: np.ndarray | None = None):
        self.config = config
        num = config.numerical
        self.mesh = Mesh(num.length, num.n_cells)
        self.disc = Discretization(self.mesh, config.physical, num.h_semi)
        self.stepper = Stepper(
            self.disc,
            TimeParams(dt=num.dt, t_end=num.t_end, strict_cfl=num.strict_cfl),
            LimiterParams(gamma=num.gamma),
            StoppingParams(h_semi=num.h_semi, h_eps=num.h_eps, u_stop=num.u_stop, hold_resting=num.hold_resting),
        )
        if initial_field is None:
            initial_field = project_initial(initial_depth(config.initial), self.mesh)
        self.field = self.stepper.prepare(initial_field)
        self.step_count = 0

    @property
    def t(self) -> float:
        return self.step_count * self.config.numerical.dt

    @property
    def flags(self) -> CellFlags:
        return self.stepper.flags

    def stats(self) -> dict:
        return field_stats(self.field, self.flags, self.mesh, self.config.physical)

    def step(self) -> None:
        self.field = self.stepper.step(self.field)
        self.step_count += 1

    def run(self, out_dir=None, snapshot_times=None, callback=None) -> RunSummary:
        """Advance to ``t_end``, recording every ``record_every`` steps."""
        num = self.config.numerical
        if snapshot_times is None:
            snapshot_times = self.config.output.snapshot_times
        n_steps = int(round(num.t_end / num.dt))
        snap_steps = {int(round(t / num.dt)): t for t in snapshot_times}
        if out_dir is not None:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)

        summary = RunSummary(self.config.name)
        start = time.perf_counter()
        while True:
            n = self.step_count
            if n % num.record_every == 0 or n == n_steps or n in snap_steps:
                summary.record(self.t, self.stats())
            if n in snap_steps:
                t_snap = snap_steps[n]
                name = f"{self.config.name}_t{t_snap:g}.csv"
                summary.snapshots[f"{t_snap:g}"] = name
                if out_dir is not None:
                    write_snapshot(self.field, self.flags, self.t, self.mesh, self.config.physical, out_dir / name)
                if callback is not None:
                    callback(self)
            if n >= n_steps:
                break
            self.step()

        summary.wall_time = time.perf_counter() - start
        summary.cfl_max = self.stepper.cfl_max
        summary.clamped_mass = self.stepper.clamped_mass
        if out_dir is not None:
            summary.write(out_dir / f"{self.config.name}_summary.json")
        return summary


def run_case(config: RunConfig, out_dir=None) -> RunSummary:
    return Simulation(config).run(out_dir)
