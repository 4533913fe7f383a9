"""Slow, independent reference implementations used to validate the fast path.

Everything here trades speed for obviousness: the Hamiltonian is
assembled entry by entry as a dense matrix, steps use the exact
eigendecomposition exponential instead of a truncated series, and the
purity reference is the four-index sum written as four loops. Window
sizes are capped so a misplaced call cannot turn into an hour of dense
algebra.
"""

from __future__ import annotations

import numpy as np

from .dynamics import evolve_1d
from .model import (
    AmplitudeGrid,
    ConfigurationError,
    LatticeWindow,
    SimulationConfig,
    StateKind,
    build_initial_state,
)

__all__ = [
    "dense_hamiltonian",
    "dense_step",
    "dense_evolve",
    "literal_purity",
    "separability_reference",
]

_DENSE_CAP = 20      # window size for single dense steps / matrix assembly
_EVOLVE_CAP = 12     # window size for full dense evolutions


def flatten_index(window: LatticeWindow, n1: int, n2: int) -> int:
    """Row-major position of the (n1, n2) configuration in the dense basis."""
    return (n1 - window.n_min) * window.size + (n2 - window.n_min)


def dense_hamiltonian(window: LatticeWindow, u: float, f: float) -> np.ndarray:
    """Full (N^2 x N^2) real-symmetric matrix at a frozen field value.

    Assembled configuration by configuration, independently of the
    stencil kernels: hopping 1 between states differing by one step of
    one particle, diagonal f*(n1+n2) plus u when the particles coincide.
    """
    n = window.size
    if n > _DENSE_CAP:
        raise ConfigurationError(f"dense matrix capped at {_DENSE_CAP}x{_DENSE_CAP} windows, got {n}")
    dim = n * n
    h = np.zeros((dim, dim))
    for n1 in window.sites():
        for n2 in window.sites():
            k = flatten_index(window, n1, n2)
            h[k, k] = f * (n1 + n2) + (u if n1 == n2 else 0.0)
            for m1, m2 in ((n1 + 1, n2), (n1 - 1, n2), (n1, n2 + 1), (n1, n2 - 1)):
                if window.contains(m1) and window.contains(m2):
                    h[k, flatten_index(window, m1, m2)] = 1.0
    return h


def dense_step(vec: np.ndarray, window: LatticeWindow, u: float, f: float,
               dt: float) -> np.ndarray:
    """Exact exp(-i*H*dt) @ vec via the eigendecomposition of the dense H."""
    h = dense_hamiltonian(window, u, f)
    lam, v = np.linalg.eigh(h)
    return v @ (np.exp(-1j * lam * dt) * (v.T @ vec))


def dense_evolve(config: SimulationConfig,
                 grid: AmplitudeGrid | None = None) -> AmplitudeGrid:
    """Propagate with exact per-step exponentials on a small window.

    Field handling matches the fast path (frozen per step, midpoint or
    left evaluation per config); the only difference left is series
    truncation, which is what the comparison is meant to expose.
    """
    n = config.window.size
    if n > _EVOLVE_CAP:
        raise ConfigurationError(f"dense evolution capped at {_EVOLVE_CAP}x{_EVOLVE_CAP} windows, got {n}")
    if grid is None:
        grid = build_initial_state(config.initial, config.window)
    vec = grid.amp.reshape(-1).astype(np.complex128)
    for step in range(config.n_steps):
        vec = dense_step(vec, config.window, config.u, config.step_field(step), config.dt)
    return AmplitudeGrid.from_amplitudes(config.window, vec.reshape(n, n))


def literal_purity(grid: AmplitudeGrid) -> float:
    """Single-particle purity as the literal four-index sum.

    P = sum over n1, m1, n2, m2 of
        psi*(n1,n2) psi(m1,n2) psi*(m1,m2) psi(n1,m2).
    Four explicit loops; use only on small grids.
    """
    a = grid.amp
    n = a.shape[0]
    if n > _EVOLVE_CAP:
        raise ConfigurationError(f"literal purity capped at {_EVOLVE_CAP}x{_EVOLVE_CAP} grids, got {n}")
    ac = np.conj(a)
    total = 0.0 + 0.0j
    for n1 in range(n):
        for m1 in range(n):
            for n2 in range(n):
                for m2 in range(n):
                    total += ac[n1, n2] * a[m1, n2] * ac[m1, m2] * a[n1, m2]
    return float(total.real)


def separability_reference(config: SimulationConfig, impl: str = "auto") -> AmplitudeGrid:
    """Non-interacting product evolution: each factor propagated in 1d.

    With u = 0 the two-particle problem factorizes exactly, so evolving
    the two Gaussian factors independently and taking their outer
    product reproduces the full state. This exercises a completely
    different code path (1d stencil) at full windows and times.
    """
    if config.u != 0.0:
        raise ConfigurationError("separable reference only valid for u = 0")
    init = config.initial
    if init.kind is not StateKind.GAUSSIAN:
        raise ConfigurationError("separable reference expects a gaussian product state")
    sites = config.window.sites().astype(np.float64)
    out = []
    for center in init.center:
        g = np.exp(-((sites - center) ** 2) / init.sigma_cap).astype(np.complex128)
        g /= np.sqrt(np.sum(np.abs(g) ** 2))
        out.append(evolve_1d(g, config.window, config.drive, config.t_final,
                             dt=config.dt, order=config.taylor_order,
                             field_eval=config.field_eval, impl=impl))
    return AmplitudeGrid.from_amplitudes(config.window, np.outer(out[0], out[1]))
