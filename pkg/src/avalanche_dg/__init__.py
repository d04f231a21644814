"""Runge-Kutta discontinuous Galerkin solver for 1D Savage-Hutter avalanches."""

from .config import RunConfig, load_config, preset
from .dg import Discretization, Mesh
from .physics import PhysicalParams, StressRegime
from .runner import RunSummary, Simulation, run_case

__all__ = [
    "Discretization",
    "Mesh",
    "PhysicalParams",
    "RunConfig",
    "RunSummary",
    "Simulation",
    "StressRegime",
    "load_config",
    "preset",
    "run_case",
]
