"""Two interacting particles on a driven 1D lattice.

Simulates a pair of distinguishable particles with on-site interaction
hopping on a one-dimensional chain under a superposed DC + AC field,
in units e = d = J = hbar = 1. Provides the truncated-Taylor propagator,
entanglement and correlation observables, small-lattice reference
propagators for validation, and an experiment runner with a CLI.
"""

__version__ = "0.1.0"
