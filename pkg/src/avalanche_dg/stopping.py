"""Wet/dry fronts and the Coulomb reposing state.

Every pass works on cell averages (mode 0).  Neighbour data are read from a
snapshot taken before any cell is modified; boundary cells see themselves as
their outer neighbour.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from . import physics
from .dg import Mesh, cell_regimes, velocity_gradient
from .physics import PhysicalParams

log = logging.getLogger(__name__)

# clamped cell averages deeper than this are reported as warnings
CLAMP_WARN_DEPTH = 1e-8


class Wetness(enum.IntEnum):
    DRY = 0
    SEMIWET = 1
    WET = 2


@dataclass(frozen=True)
class StoppingParams:
    """Thresholds of the front and repose treatment.

    ``u_stop`` is the speed below which a flowing cell may come to rest.
    With ``hold_resting`` a cell that is already at rest stays there as long
    as the force balance holds and its stage speed is within one step of
    friction; without it every cell must pass the ``u_stop`` gate anew.
    """

    h_semi: float = 1e-6
    h_eps: float = 1e-10
    u_stop: float = 1e-6
    hold_resting: bool = False

    def __post_init__(self):
        if not 0.0 < self.h_eps < self.h_semi:
            raise ValueError("need 0 < h_eps < h_semi")
        if not self.u_stop >= 0.0:
            raise ValueError("u_stop must be non-negative")


@dataclass
class CellFlags:
    wetness: np.ndarray
    m_stop: np.ndarray

    @classmethod
    def flowing(cls, n: int) -> "CellFlags":
        return cls(np.full(n, Wetness.WET, dtype=np.int8), np.ones(n, dtype=np.int8))

    def copy(self) -> "CellFlags":
        return CellFlags(self.wetness.copy(), self.m_stop.copy())


def _neighbours(a: np.ndarray):
    left = np.concatenate([a[:1], a[:-1]])
    right = np.concatenate([a[1:], a[-1:]])
    return left, right


def clamp_negative_depth(field: np.ndarray, mesh: Mesh):
    """Reset cells with negative average depth to vacuum.

    Returns ``(field, added_mass)``; the field is modified in place.
    """
    neg = field[0, 0] < 0.0
    if not neg.any():
        return field, 0.0
    added = -float(np.sum(field[0, 0, neg] * mesh.widths[neg]))
    deepest = -float(field[0, 0, neg].min())
    if deepest > CLAMP_WARN_DEPTH:
        log.warning("clamped %d cells with negative depth (min %.3e)", int(neg.sum()), -deepest)
    field[:, :, neg] = 0.0
    return field, added


def classify(field: np.ndarray, params: StoppingParams = StoppingParams()) -> np.ndarray:
    """Wetness of every cell; zeroes the discharge of dry cells in place."""
    hbar = field[0, 0]
    wetness = np.where(
        hbar <= params.h_eps,
        Wetness.DRY,
        np.where(hbar < params.h_semi, Wetness.SEMIWET, Wetness.WET),
    ).astype(np.int8)
    field[1, :, wetness == Wetness.DRY] = 0.0
    return wetness


def donor_offsets(hbar: np.ndarray, h_semi: float) -> np.ndarray:
    """Which neighbour a semi-wet cell takes its velocity from.

    -1 for the left neighbour, +1 for the right one, 0 when both neighbours are
    below ``h_semi`` (velocity forced to zero).  When at least one neighbour is
    wet the deeper one is chosen, so the donor is always a wet cell.
    """
    hl, hr = _neighbours(hbar)
    return np.where(
        (hl < h_semi) & (hr < h_semi), 0, np.where(hl >= hr, -1, 1)
    ).astype(np.int8)


def fix_semiwet(field: np.ndarray, wetness: np.ndarray, params: StoppingParams = StoppingParams()) -> np.ndarray:
    """Extrapolate the velocity into semi-wet cells, in place."""
    semi = wetness == Wetness.SEMIWET
    if not semi.any():
        return field
    hbar = field[0, 0]
    ubar = physics.velocity(hbar, field[1, 0])
    ul, ur = _neighbours(ubar)
    donor = donor_offsets(hbar, params.h_semi)
    u_new = np.where(donor == 0, 0.0, np.where(donor < 0, ul, ur))
    field[1, 0, semi] = hbar[semi] * u_new[semi]
    field[1, 1:, semi] = 0.0
    return field


def repose_test(
    field: np.ndarray,
    wetness: np.ndarray,
    physical: PhysicalParams,
    mesh: Mesh,
    params: StoppingParams = StoppingParams(),
    dt: float = 0.0,
    prev_m_stop: np.ndarray | None = None,
) -> np.ndarray:
    """Tag resting cells and zero their discharge, in place.

    A wet cell rests when the net tangential driving acceleration (gravity
    plus the depth-gradient pressure term) does not exceed the Coulomb
    ceiling and either

    * its average speed is at most ``params.u_stop``, or
    * ``params.hold_resting`` is set, it was resting before
      (``prev_m_stop == 0``) and the speed it picked up since is within what
      friction removes in one step, ``dt * ceiling``.

    Semi-wet cells rest with their donor; dry cells always count as resting.
    Returns ``m_stop``.
    """
    x = mesh.centers
    hbar = field[0, 0]
    ubar = physics.velocity(hbar, field[1, 0])
    wet = wetness == Wetness.WET

    regimes = cell_regimes(ubar, wet, mesh.dx)
    beta = physics.beta(x, regimes, physical)
    grad_h = velocity_gradient(hbar, wet, mesh.dx)
    drive = np.sin(physics.zeta(x, physical)) - beta * grad_h
    ceiling = physics.friction_ceiling(x, ubar, physical)

    speed = np.abs(ubar)
    slow = speed <= params.u_stop
    if params.hold_resting and prev_m_stop is not None:
        slow |= (np.asarray(prev_m_stop) == 0) & (speed <= dt * ceiling)
    rest_wet = wet & slow & (np.abs(drive) <= ceiling)
    m_stop = np.where(rest_wet, 0, 1).astype(np.int8)
    m_stop[wetness == Wetness.DRY] = 0

    semi = wetness == Wetness.SEMIWET
    if semi.any():
        donor = donor_offsets(hbar, params.h_semi)
        ml, mr = _neighbours(m_stop)
        donor_stop = np.where(donor == 0, 0, np.where(donor < 0, ml, mr))
        m_stop[semi] = donor_stop[semi]

    resting = (m_stop == 0) & (wetness != Wetness.DRY)
    field[1, :, resting] = 0.0
    return m_stop


def postprocess(
    field: np.ndarray,
    physical: PhysicalParams,
    mesh: Mesh,
    params: StoppingParams = StoppingParams(),
    dt: float = 0.0,
    prev_m_stop: np.ndarray | None = None,
):
    """Clamp, classify, fix semi-wet cells and run the repose test, in place.

    Returns ``(field, flags, added_mass)``.
    """
    field, added = clamp_negative_depth(field, mesh)
    wetness = classify(field, params)
    fix_semiwet(field, wetness, params)
    m_stop = repose_test(field, wetness, physical, mesh, params, dt, prev_m_stop)
    return field, CellFlags(wetness, m_stop), added
