"""Threshold-3 bootstrap percolation on Z^2.

Simulation library and Monte Carlo experiment harness for the cellular
automaton in which open sites (1) are permanent and a closed site (0)
opens once at least three of its four lattice neighbors are open.
"""

__version__ = "0.1.0"

from .lattice import (
    Adjacency,
    BoundaryCondition,
    Configuration,
    HaloNeighbor,
    Plaquette,
    Site,
    graph_distance,
    neighbors,
    plaquette_partition,
    plaquettes_containing,
    sample_configuration,
)
from .dynamics import (
    EvolutionResult,
    FlipTimeField,
    determined_by_window,
    evolve,
    fixed_point,
    light_cone_radius,
    step,
)

__all__ = [
    "Adjacency",
    "BoundaryCondition",
    "Configuration",
    "EvolutionResult",
    "FlipTimeField",
    "HaloNeighbor",
    "Plaquette",
    "Site",
    "__version__",
    "determined_by_window",
    "evolve",
    "fixed_point",
    "graph_distance",
    "light_cone_radius",
    "neighbors",
    "plaquette_partition",
    "plaquettes_containing",
    "sample_configuration",
    "step",
]
