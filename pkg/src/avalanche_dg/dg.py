"""Modal P2 discontinuous Galerkin discretization in space.

A field is stored as an array ``U`` of shape ``(2, 3, N)``: variable
(0 = depth, 1 = discharge), Legendre mode, cell.  Mode 0 is the cell average.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import physics
from .physics import PhysicalParams, StressRegime

DEGREE = 2
N_MODES = DEGREE + 1

# 3-point Gauss rule on the reference cell [-1, 1], weights normalised to sum 1
GAUSS_NODES = np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
GAUSS_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def _legendre(l: int, xi):
    if l == 0:
        return np.ones_like(xi)
    if l == 1:
        return xi
    if l == 2:
        return 0.5 * (3.0 * xi * xi - 1.0)
    raise ValueError(f"mode index {l} outside 0..{DEGREE}")


def _legendre_derivative(l: int, xi):
    """d phi_l / d xi on the reference cell."""
    if l == 0:
        return np.zeros_like(xi)
    if l == 1:
        return np.ones_like(xi)
    if l == 2:
        return 3.0 * xi
    raise ValueError(f"mode index {l} outside 0..{DEGREE}")


# BASIS_AT_GAUSS[m, g] = phi_m at Gauss node g
BASIS_AT_GAUSS = np.array([_legendre(m, GAUSS_NODES) for m in range(N_MODES)])
# values at the right (x^-_{j+1/2}) and left (x^+_{j-1/2}) cell ends
BASIS_RIGHT = np.ones(N_MODES)
BASIS_LEFT = np.array([(-1.0) ** m for m in range(N_MODES)])


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of ``[0, length]`` into ``n_cells`` cells."""

    length: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1 or not self.length > 0:
            raise ValueError("mesh needs a positive length and at least one cell")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @cached_property
    def interfaces(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_cells + 1)

    @cached_property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.interfaces[:-1] + self.interfaces[1:])

    @cached_property
    def widths(self) -> np.ndarray:
        return np.diff(self.interfaces)

    @cached_property
    def gauss_points(self) -> np.ndarray:
        """Physical Gauss points, shape ``(3, N)``."""
        return self.centers[None, :] + 0.5 * self.widths[None, :] * GAUSS_NODES[:, None]


def basis_eval(l: int, x, center: float, width: float):
    """Scaled Legendre basis function ``phi_l`` of the cell ``[center -+ width/2]``."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x - center) > 0.5 * width * (1.0 + 1e-12)):
        raise ValueError("x lies outside the cell")
    return _legendre(l, 2.0 * (x - center) / width)


def gauss3(f, center: float, width: float) -> float:
    """Integrate ``f`` over one cell with the 3-point Gauss rule."""
    x = center + 0.5 * width * GAUSS_NODES
    return width * float(np.dot(GAUSS_WEIGHTS, f(x)))


def mass_matrix(k: int, width: float) -> np.ndarray:
    if k != DEGREE:
        raise ValueError(f"only degree {DEGREE} is supported, got {k}")
    return width * np.diag(1.0 / (2.0 * np.arange(N_MODES) + 1.0))


def project(func, mesh: Mesh) -> np.ndarray:
    """L2 projection of a scalar function onto P2, shape ``(3, N)``.

    ``U_l = (2l+1)/Delta * int func phi_l`` with the 3-point Gauss rule.
    """
    values = func(mesh.gauss_points)  # (3, N)
    weighted = GAUSS_WEIGHTS[:, None] * values
    scale = 2.0 * np.arange(N_MODES)[:, None] + 1.0
    return scale * (BASIS_AT_GAUSS @ weighted)


def project_initial(h0, mesh: Mesh, q0=None) -> np.ndarray:
    """Project initial depth (and optional discharge) profiles into a field."""
    field = np.zeros((2, N_MODES, mesh.n_cells))
    field[0] = project(h0, mesh)
    if q0 is not None:
        field[1] = project(q0, mesh)
    return field


def evaluate(field: np.ndarray, xi) -> np.ndarray:
    """Evaluate every cell polynomial at reference coordinates ``xi``.

    Returns shape ``(2, len(xi), N)``.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    phi = np.array([_legendre(m, xi) for m in range(N_MODES)])  # (3, G)
    return np.einsum("vmj,mg->vgj", field, phi)


def traces(field: np.ndarray):
    """Right-end and left-end values of every cell, each of shape ``(2, N)``."""
    right = field[:, 0] + field[:, 1] + field[:, 2]
    left = field[:, 0] - field[:, 1] + field[:, 2]
    return right, left


def llf_flux(h_l, q_l, h_r, q_r, beta_l, beta_r, eta=1.0):
    """Local Lax-Friedrichs flux with a gate ``eta`` on the mass dissipation."""
    f1_l, f2_l = physics.flux(h_l, q_l, beta_l)
    f1_r, f2_r = physics.flux(h_r, q_r, beta_r)
    alpha = np.maximum(physics.max_speed(h_l, q_l, beta_l), physics.max_speed(h_r, q_r, beta_r))
    mass = 0.5 * (f1_l + f1_r - eta * alpha * (np.asarray(h_r) - h_l))
    momentum = 0.5 * (f2_l + f2_r - alpha * (np.asarray(q_r) - q_l))
    return mass, momentum


def velocity_gradient(ubar, wet, dx: float) -> np.ndarray:
    """Cell-wise ``du/dx`` from neighbouring cell averages.

    Central where both neighbours are wet, one-sided towards the wet neighbour
    at a front, zero for an isolated cell.
    """
    ubar = np.asarray(ubar, dtype=float)
    wet = np.asarray(wet, dtype=bool)
    ul = np.concatenate([ubar[:1], ubar[:-1]])
    ur = np.concatenate([ubar[1:], ubar[-1:]])
    wl = np.concatenate([wet[:1], wet[:-1]])
    wr = np.concatenate([wet[1:], wet[-1:]])
    return np.where(
        wl & wr,
        (ur - ul) / (2.0 * dx),
        np.where(wr, (ur - ubar) / dx, np.where(wl, (ubar - ul) / dx, 0.0)),
    )


def cell_regimes(ubar, wet, dx: float) -> np.ndarray:
    """Active where the velocity gradient indicator is non-negative."""
    grad = velocity_gradient(ubar, wet, dx)
    return np.where(grad >= 0.0, StressRegime.ACTIVE, StressRegime.PASSIVE).astype(np.int8)


def stress_regime_of_cell(field: np.ndarray, j: int, mesh: Mesh, h_semi: float = 1e-6) -> StressRegime:
    h = field[0, 0]
    wet = h >= h_semi
    return StressRegime(int(cell_regimes(physics.velocity(h, field[1, 0]), wet, mesh.dx)[j]))


class Discretization:
    """Semi-discrete operator ``dU/dt = L(U)`` on a fixed mesh.

    Geometric factors at Gauss points and interfaces are computed once.
    """

    def __init__(self, mesh: Mesh, params: PhysicalParams, h_semi: float = 1e-6):
        self.mesh = mesh
        self.params = params
        self.h_semi = h_semi

        xg = mesh.gauss_points
        xf = mesh.interfaces
        self.k_act = physics.earth_pressure_coefficient(StressRegime.ACTIVE, params)
        self.k_pass = physics.earth_pressure_coefficient(StressRegime.PASSIVE, params)
        self.tan_delta = np.tan(params.delta)

        self.eps_cos_gauss = params.epsilon * np.cos(physics.zeta(xg, params))
        self.sin_gauss = np.sin(physics.zeta(xg, params))
        self.cos_gauss = np.cos(physics.zeta(xg, params))
        self.chi_kappa_gauss = params.chi * physics.kappa(xg, params)
        self.eps_cos_face = params.epsilon * np.cos(physics.zeta(xf, params))
        xc = mesh.centers
        self.sin_center = np.sin(physics.zeta(xc, params))
        self.cos_center = np.cos(physics.zeta(xc, params))
        self.chi_kappa_center = params.chi * physics.kappa(xc, params)
        self.eps_cos_center = params.epsilon * self.cos_center

        width = mesh.widths
        self.inv_mass = (2.0 * np.arange(N_MODES)[:, None] + 1.0) / width[None, :]
        self.quad_w = width[None, :] * GAUSS_WEIGHTS[:, None]  # Delta * omega_g, (3, N)

    def earth_pressure(self, regimes) -> np.ndarray:
        return np.where(regimes == StressRegime.PASSIVE, self.k_pass, self.k_act)

    def regimes(self, field: np.ndarray) -> np.ndarray:
        hbar = field[0, 0]
        ubar = physics.velocity(hbar, field[1, 0])
        return cell_regimes(ubar, hbar >= self.h_semi, self.mesh.dx)

    def interface_fluxes(self, field, regimes, m_stop):
        """Numerical fluxes at all ``N + 1`` interfaces, shape ``(2, N + 1)``."""
        k = self.earth_pressure(regimes)
        right, left = traces(field)
        # zero-gradient ghost cells: the outer state equals the boundary trace
        u_minus = np.concatenate([left[:, :1], right], axis=1)
        u_plus = np.concatenate([left, right[:, -1:]], axis=1)
        k_minus = np.concatenate([k[:1], k])
        k_plus = np.concatenate([k, k[-1:]])
        stop = np.asarray(m_stop)
        eta = np.maximum(np.concatenate([stop[:1], stop]), np.concatenate([stop, stop[-1:]]))
        return np.array(
            llf_flux(
                u_minus[0], u_minus[1], u_plus[0], u_plus[1],
                self.eps_cos_face * k_minus, self.eps_cos_face * k_plus, eta,
            )
        )

    def rhs(self, field: np.ndarray, m_stop, regimes=None) -> np.ndarray:
        """Time derivative of every mode, same shape as ``field``."""
        if regimes is None:
            regimes = self.regimes(field)
        fhat = self.interface_fluxes(field, regimes, m_stop)
        f_right = fhat[:, 1:]
        f_left = fhat[:, :-1]

        hg, qg = np.einsum("vmj,mg->vgj", field, BASIS_AT_GAUSS)
        beta_g = self.eps_cos_gauss * self.earth_pressure(regimes)[None, :]
        _, f2 = physics.flux(hg, qg, beta_g)

        ug = physics.velocity(hg, qg)
        ceiling = self.tan_delta * np.maximum(0.0, self.cos_gauss + self.chi_kappa_gauss * ug * ug)
        s2 = np.where(hg > physics.H_EPS, hg * (self.sin_gauss - np.sign(ug) * ceiling), 0.0)

        vol = np.zeros_like(field)
        # mass flux integrals are exact: int q phi_1' = 2 q_0, int q phi_2' = 2 q_1
        vol[0, 1] = 2.0 * field[1, 0]
        vol[0, 2] = 2.0 * field[1, 1]
        wf2 = GAUSS_WEIGHTS[:, None] * f2
        vol[1, 1] = 2.0 * wf2.sum(axis=0)
        vol[1, 2] = 6.0 * (GAUSS_NODES[:, None] * wf2).sum(axis=0)
        vol[1] += BASIS_AT_GAUSS @ (self.quad_w * s2)

        surf = f_right[:, None, :] - BASIS_LEFT[None, :, None] * f_left[:, None, :]
        return (vol - surf) * self.inv_mass[None]

    def rhs_compiled(self, field: np.ndarray, m_stop) -> np.ndarray:
        """Same as :meth:`rhs` through the compiled kernel."""
        from . import kernels

        return kernels.rhs(
            field, np.asarray(m_stop, dtype=np.int8),
            self.eps_cos_gauss, self.sin_gauss, self.cos_gauss, self.chi_kappa_gauss,
            self.eps_cos_face, self.mesh.widths, self.mesh.dx,
            self.k_act, self.k_pass, self.tan_delta, self.h_semi, np.empty_like(field),
        )
