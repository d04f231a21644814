"""Generalized TVD slope limiter for the modal P2 field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LimiterParams:
    gamma: float = 0.5
    enabled: bool = True

    def __post_init__(self):
        if not 0.5 <= self.gamma <= 1.0:
            raise ValueError(f"limiter gamma must lie in [1/2, 1], got {self.gamma!r}")


def minmod(a1, a2, a3):
    """Three-argument minmod, elementwise."""
    a1, a2, a3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (a1, a2, a3)))
    s = np.sign(a1)
    same = (s == np.sign(a2)) & (s == np.sign(a3))
    out = np.where(same, s * np.minimum(np.minimum(np.abs(a1), np.abs(a2)), np.abs(a3)), 0.0)
    return out[()] if out.ndim == 0 else out


def limited_slopes(averages: np.ndarray, slopes: np.ndarray, gamma: float):
    """Limited mode-1 coefficients for every cell of one or more variables.

    ``averages`` and ``slopes`` have the cell index last.  Boundary cells see
    ghost neighbours equal to themselves.  Returns ``(new_slopes, untouched)``.

    The linear part of cell ``j`` has interface values ``avg -+ slope``, so the
    limited values ``avg + mm(slope, ...)`` and ``avg - mm(slope, ...)`` match
    the unlimited ones exactly when ``mm(slope, ...) == slope``.  Comparing in
    slope space avoids round-off in ``(avg + slope) - avg``.
    """
    left = np.concatenate([averages[..., :1], averages[..., :-1]], axis=-1)
    right = np.concatenate([averages[..., 1:], averages[..., -1:]], axis=-1)
    d_minus = gamma * (averages - left)
    d_plus = gamma * (right - averages)
    new = minmod(slopes, d_minus, d_plus)
    return new, new == slopes


def limit(field: np.ndarray, params: LimiterParams = LimiterParams()) -> np.ndarray:
    """Limit every cell of every variable; returns a new field.

    Cells whose linear part passes the minmod test keep their full P2
    polynomial.  Otherwise the slope is replaced by the limited one and the
    quadratic mode is dropped.  Cell averages are never changed.
    """
    out = field.copy()
    if not params.enabled:
        return out
    new, untouched = limited_slopes(field[:, 0], field[:, 1], params.gamma)
    out[:, 1] = np.where(untouched, field[:, 1], new)
    out[:, 2] = np.where(untouched, field[:, 2], 0.0)
    return out


def limit_cell(field: np.ndarray, j: int, params: LimiterParams = LimiterParams()) -> np.ndarray:
    """Limit only cell ``j``, reading the current neighbour averages."""
    out = field.copy()
    n = field.shape[-1]
    idx = [max(j - 1, 0), j, min(j + 1, n - 1)]
    avg = field[:, 0][:, idx]
    new, untouched = limited_slopes(avg, field[:, 1][:, idx], params.gamma)
    for v in range(field.shape[0]):
        if not untouched[v, 1]:
            out[v, 1, j] = new[v, 1]
            out[v, 2, j] = 0.0
    return out
