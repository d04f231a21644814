"""Map chute coordinates ``(x, h)`` to horizontal/vertical plotting coordinates.

The chute is a plane inclined at ``zeta0`` up to ``x_incl_end``, a circular
arc of radius ``r = L_t / zeta0`` over the transition of length ``L_t``, and
a horizontal run-out.  The horizontal axis is aligned with the run-out.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .physics import PhysicalParams, zeta


class PhysicalPoint(NamedTuple):
    x_b: np.ndarray
    y_b: np.ndarray
    h_xb: np.ndarray
    h_yb: np.ndarray


def to_physical(x, h, p: PhysicalParams) -> PhysicalPoint:
    if p.zeta0 <= 0.0:
        raise ValueError("to_physical needs a positive inclination zeta0")
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    x, h = np.broadcast_arrays(x, h)
    a, b = p.x_incl_end, p.x_trans_end
    r = p.transition_length / p.zeta0
    x1 = a * math.cos(p.zeta0)
    y1 = r * (1.0 - math.cos(p.zeta0))
    x2 = x1 + r * math.sin(p.zeta0)

    runout = x >= b
    arc = (x >= a) & ~runout
    ang = np.where(arc, (b - x) / r, np.where(runout, 0.0, p.zeta0))

    x_b = np.where(runout, x2 + (x - b), np.where(arc, x2 - r * np.sin(ang), x * math.cos(p.zeta0)))
    y_b = np.where(runout, 0.0, np.where(arc, r * (1.0 - np.cos(ang)), y1 + (a - x) * math.sin(p.zeta0)))
    h_xb = h * np.sin(ang)
    h_yb = h * np.cos(ang)
    return PhysicalPoint(*(v[()] if v.ndim == 0 else v for v in (x_b, y_b, h_xb, h_yb)))


def bed_sketch(x, p: PhysicalParams):
    """Bed elevation drawn above the reference surface; plotting only."""
    return p.yb0 * (1.0 - math.cos(math.pi / 4.0)) * np.sin(zeta(x, p))
