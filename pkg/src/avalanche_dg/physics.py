"""Continuous Savage-Hutter model on the incline / arc / run-out chute.

All functions accept scalars or numpy arrays and broadcast.  Angles are in
radians.  Depth and discharge are the dimensionless ``h`` and ``q = h u``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# depth below which a state is treated as vacuum when recovering velocity
H_EPS = 1e-10


class ParameterError(ValueError):
    """Physically inadmissible model parameters."""


class StressRegime(enum.IntEnum):
    ACTIVE = 0
    PASSIVE = 1


@dataclass(frozen=True)
class PhysicalParams:
    """Parameters of the continuous model.

    Attributes:
        zeta0: inclination of the upper plane (rad).
        phi: internal friction angle (rad).
        delta: bed friction angle (rad).
        epsilon: aspect ratio H/L.
        chi: curvature-stretch factor multiplying the curvature.
        x_incl_end: end of the inclined plane.
        x_trans_end: end of the curved transition.
        yb0: amplitude of the bed sketch (plotting only).
    """

    zeta0: float = math.radians(35.0)
    phi: float = math.radians(30.0)
    delta: float = math.radians(30.0)
    epsilon: float = 1.85 / 30.0
    chi: float = 1.0
    x_incl_end: float = 17.5
    x_trans_end: float = 21.5
    yb0: float = 10.0

    def __post_init__(self):
        if not (0.0 <= self.delta <= self.phi < math.pi / 2):
            raise ParameterError(
                f"need 0 <= delta <= phi < pi/2, got delta={self.delta!r}, phi={self.phi!r}"
            )
        if not self.epsilon >= 0.0:
            raise ParameterError(f"epsilon must be non-negative, got {self.epsilon!r}")
        if not self.x_incl_end < self.x_trans_end:
            raise ParameterError("x_incl_end must be smaller than x_trans_end")

    @classmethod
    def from_degrees(cls, zeta0: float, phi: float, delta: float, **kwargs) -> "PhysicalParams":
        return cls(
            zeta0=math.radians(zeta0),
            phi=math.radians(phi),
            delta=math.radians(delta),
            **kwargs,
        )

    @property
    def transition_length(self) -> float:
        return self.x_trans_end - self.x_incl_end


def zeta(x, p: PhysicalParams):
    """Inclination angle of the reference surface at ``x``."""
    x = np.asarray(x, dtype=float)
    s = (x - p.x_incl_end) / p.transition_length
    out = p.zeta0 * (1.0 - np.clip(s, 0.0, 1.0))
    return out[()] if out.ndim == 0 else out


def kappa(x, p: PhysicalParams):
    """Curvature ``-d zeta / dx``; nonzero only strictly inside the transition."""
    x = np.asarray(x, dtype=float)
    inside = (x > p.x_incl_end) & (x < p.x_trans_end)
    out = np.where(inside, p.zeta0 / p.transition_length, 0.0)
    return out[()] if out.ndim == 0 else out


def earth_pressure_coefficient(regime, p: PhysicalParams):
    """Mohr-Coulomb earth pressure coefficient.

    ``regime`` is a :class:`StressRegime` or an integer array of them; the
    active value (minus sign) is returned where it is ``ACTIVE``.
    """
    radicand = 1.0 - math.cos(p.phi) ** 2 / math.cos(p.delta) ** 2
    if radicand < -1e-15:
        raise ParameterError("cos^2(phi) sec^2(delta) > 1: bed friction exceeds internal friction")
    root = math.sqrt(max(radicand, 0.0))
    sec2 = 1.0 / math.cos(p.phi) ** 2
    k_act = 2.0 * sec2 * (1.0 - root) - 1.0
    k_pass = 2.0 * sec2 * (1.0 + root) - 1.0
    regime = np.asarray(regime)
    out = np.where(regime == StressRegime.PASSIVE, k_pass, k_act)
    return float(out) if out.ndim == 0 else out


def beta(x, regime, p: PhysicalParams):
    """Hydrostatic pressure factor ``epsilon cos(zeta(x)) K``."""
    return p.epsilon * np.cos(zeta(x, p)) * earth_pressure_coefficient(regime, p)


def velocity(h, q):
    """Depth-averaged velocity, zero where the depth is at or below ``H_EPS``."""
    h = np.asarray(h, dtype=float)
    q = np.asarray(q, dtype=float)
    wet = h > H_EPS
    out = np.where(wet, q / np.where(wet, h, 1.0), 0.0)
    return out[()] if out.ndim == 0 else out


def flux(h, q, beta_):
    """Physical flux ``(q, q^2/h + beta h^2 / 2)``.

    States at or below the vacuum depth ``H_EPS`` (including negative point
    values of a polynomial reconstruction) have zero flux.
    """
    h = np.asarray(h, dtype=float)
    u = velocity(h, q)
    wet = h > H_EPS
    hp = np.where(wet, h, 0.0)
    qq = np.where(wet, q, 0.0)
    return qq, qq * u + 0.5 * beta_ * hp * hp


def eigenvalues(h, q, beta_):
    """Characteristic speeds ``u -+ sqrt(beta h)``."""
    u = velocity(h, q)
    c = np.sqrt(np.maximum(beta_ * np.maximum(h, 0.0), 0.0))
    return u - c, u + c


def max_speed(h, q, beta_):
    """Largest absolute eigenvalue, ``|u| + sqrt(beta h)``."""
    u = velocity(h, q)
    return np.abs(u) + np.sqrt(np.maximum(beta_ * np.maximum(h, 0.0), 0.0))


def friction_ceiling(x, u, p: PhysicalParams):
    """Coulomb friction magnitude ``tan(delta) max(0, cos zeta + chi kappa u^2)``."""
    return math.tan(p.delta) * np.maximum(0.0, np.cos(zeta(x, p)) + p.chi * kappa(x, p) * u * u)


def driving_acceleration(x, u, p: PhysicalParams):
    """Net down-slope acceleration ``s(u)``; the friction term vanishes at ``u == 0``."""
    return np.sin(zeta(x, p)) - np.sign(u) * friction_ceiling(x, u, p)


def source(h, q, x, p: PhysicalParams):
    """Source pair ``(0, h s(u))``."""
    h = np.asarray(h, dtype=float)
    u = velocity(h, q)
    s2 = np.where(h > H_EPS, h * driving_acceleration(x, u, p), 0.0)
    return np.zeros_like(s2), s2
