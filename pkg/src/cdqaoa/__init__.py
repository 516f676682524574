"""QAOA and digitized-counterdiabatic QAOA on 1D MaxCut/Ising chains.

Free-fermion (Jordan-Wigner) simulation of variational circuits on weighted
Ising chains, with a dense statevector oracle, convergence analytics and an
ensemble experiment harness.
"""

from .model import (
    AngleSchedule,
    Boundary,
    ChainSpec,
    SpectrumBounds,
    Variant,
    expand_constrained,
    make_open_random,
    make_open_uniform,
    make_ring_uniform,
    params_per_step,
    spectrum_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSchedule",
    "Boundary",
    "ChainSpec",
    "SpectrumBounds",
    "Variant",
    "expand_constrained",
    "make_open_random",
    "make_open_uniform",
    "make_ring_uniform",
    "params_per_step",
    "spectrum_bounds",
    "__version__",
]
