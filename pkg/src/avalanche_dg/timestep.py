"""Third-order SSP Runge-Kutta stepping with per-stage post-processing."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import physics
from .dg import DEGREE, Discretization
from .limiter import LimiterParams, limit
from .stopping import CellFlags, StoppingParams, postprocess

log = logging.getLogger(__name__)


class CFLViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class TimeParams:
    dt: float = 0.001
    t_end: float = 48.0
    cfl_limit: float = 1.0 / (2 * DEGREE + 1)
    strict_cfl: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.cfl_limit <= 1.0:
            raise ValueError("cfl_limit must lie in (0, 1]")


def ssp_rk3(u, dt, operator, post=lambda v: v):
    """One SSP-RK3 step of ``u' = operator(u)``.

    The stages are the Shu-Osher convex combinations written as increments on
    ``u``, e.g. ``3/4 u + 1/4 (v + dt L(v)) == u + 1/4 ((v - u) + dt L(v))``,
    so a state whose stage increments vanish is reproduced bit for bit.
    ``post`` is applied after every stage.
    """
    u1 = post(u + dt * operator(u))
    u2 = post(u + 0.25 * ((u1 - u) + dt * operator(u1)))
    return post(u + (2.0 / 3.0) * ((u2 - u) + dt * operator(u2)))


def cfl_number(field: np.ndarray, disc: Discretization, dt: float) -> float:
    """``max_j (max |lambda| / Delta_j) dt`` from cell averages."""
    hbar, qbar = field[0, 0], field[1, 0]
    x = disc.mesh.centers
    beta = disc.params.epsilon * np.cos(physics.zeta(x, disc.params)) * disc.earth_pressure(disc.regimes(field))
    speed = physics.max_speed(hbar, qbar, beta)
    return float(np.max(speed / disc.mesh.widths) * dt)


def cfl_check(field: np.ndarray, disc: Discretization, dt: float, limit_: float = 1.0 / (2 * DEGREE + 1)):
    c = cfl_number(field, disc, dt)
    return c, c > limit_


@dataclass
class Stepper:
    """Advances a field, keeping the flags and clamp bookkeeping between steps."""

    disc: Discretization
    time: TimeParams = TimeParams()
    limiter: LimiterParams = LimiterParams()
    stopping: StoppingParams = StoppingParams()
    backend: str = "compiled"
    clamped_mass: float = 0.0
    cfl_max: float = 0.0
    flags: CellFlags | None = dc_field(default=None)
    _warned: bool = dc_field(default=False, repr=False)

    def __post_init__(self):
        if self.backend not in ("compiled", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")

    def prepare(self, field: np.ndarray) -> np.ndarray:
        """Limit and post-process a freshly projected field."""
        return self._post(field)

    def _post(self, field: np.ndarray) -> np.ndarray:
        if self.backend == "numpy":
            prev = None if self.flags is None else self.flags.m_stop
            field = limit(field, self.limiter)
            field, self.flags, added = postprocess(
                field, self.disc.params, self.disc.mesh, self.stopping, self.time.dt, prev
            )
        else:
            field, self.flags, added = self._post_compiled(field)
        self.clamped_mass += added
        return field

    def _post_compiled(self, field: np.ndarray):
        from . import kernels

        d = self.disc
        field = field.copy()
        if self.limiter.enabled:
            kernels.limit(field, self.limiter.gamma)
        n = field.shape[2]
        flags = CellFlags(np.empty(n, dtype=np.int8), np.empty(n, dtype=np.int8))
        if self.flags is None or not self.stopping.hold_resting:
            prev = np.ones(n, dtype=np.int8)
        else:
            prev = self.flags.m_stop
        added = kernels.postprocess(
            field, d.mesh.widths, d.mesh.dx, d.sin_center, d.cos_center,
            d.chi_kappa_center, d.eps_cos_center, d.k_act, d.k_pass, d.tan_delta,
            self.stopping.h_semi, self.stopping.h_eps, self.stopping.u_stop, self.time.dt,
            prev, flags.wetness, flags.m_stop,
        )
        return field, flags, added

    def _operator(self, field: np.ndarray) -> np.ndarray:
        if self.backend == "numpy":
            return self.disc.rhs(field, self.flags.m_stop)
        return self.disc.rhs_compiled(field, self.flags.m_stop)

    def step(self, field: np.ndarray) -> np.ndarray:
        if self.flags is None:
            field = self.prepare(field)
        cfl, bad = cfl_check(field, self.disc, self.time.dt, self.time.cfl_limit)
        self.cfl_max = max(self.cfl_max, cfl)
        if bad:
            msg = f"CFL number {cfl:.3f} exceeds {self.time.cfl_limit:.3f}"
            if self.time.strict_cfl:
                raise CFLViolation(msg)
            if not self._warned:
                log.warning(msg)
                self._warned = True
        return ssp_rk3(field, self.time.dt, self._operator, self._post)
