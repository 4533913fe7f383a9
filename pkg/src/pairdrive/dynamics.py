"""Time propagation of the driven two-particle lattice state.

One step advances psi by the truncated Taylor expansion of exp(-i*H*dt)
with the field frozen for the step (midpoint of the interval by
default), using the forward recurrence

    term_0 = psi,   term_l = (-i*dt/l) * H term_{l-1},   psi += term_l

up to the configured order. Norm and border occupation are monitored at
sample times; violations raise typed errors rather than silently
producing garbage.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from . import kernels
from .model import (
    AmplitudeGrid,
    ConfigurationError,
    DriveParameters,
    LatticeWindow,
    SimulationConfig,
    build_initial_state,
)

__all__ = [
    "SimulationError",
    "IntegrationDivergedError",
    "BorderBreachError",
    "Stepper",
    "evolve",
    "evolve_1d",
    "apply_hamiltonian",
    "taylor_step",
]

Hook = Callable[[float, AmplitudeGrid], None]


class SimulationError(RuntimeError):
    """A run violated one of its invariants at time `t`."""

    def __init__(self, message: str, t: float, value: float):
        super().__init__(message)
        self.t = t
        self.value = value


class IntegrationDivergedError(SimulationError):
    """Total probability drifted beyond the configured tolerance."""


class BorderBreachError(SimulationError):
    """Probability reached the window edge above the configured threshold."""


class Stepper:
    """Holds the evolving state plus scratch grids and advances it in place."""

    def __init__(self, config: SimulationConfig, impl: str = "auto",
                 grid: AmplitudeGrid | None = None):
        self.config = config
        self.kernel = kernels.get_kernel(impl)
        if grid is None:
            grid = build_initial_state(config.initial, config.window)
        elif grid.window != config.window:
            raise ConfigurationError("supplied grid window does not match the config window")
        else:
            grid = grid.copy()
        self.grid = grid
        self._term = np.zeros_like(grid.padded)
        self._hterm = np.zeros_like(grid.padded)
        self.step = 0

    @property
    def t(self) -> float:
        return self.step * self.config.dt

    def advance(self, n_steps: int = 1):
        """Run `n_steps` propagation steps (no invariant checks)."""
        c = self.config
        pad, term, hterm = self.grid.padded, self._term, self._hterm
        kstep = self.kernel.taylor_step_2d
        n_min, u, dt, order = c.window.n_min, c.u, c.dt, c.taylor_order
        for _ in range(n_steps):
            kstep(pad, term, hterm, n_min, u, c.step_field(self.step), dt, order)
            self.step += 1

    def check_invariants(self) -> tuple[float, float]:
        """Return (norm, border_max), raising if either is out of spec."""
        c = self.config
        norm = self.grid.norm_sq()
        if abs(norm - 1.0) > c.norm_tolerance:
            raise IntegrationDivergedError(
                f"norm drifted to {norm:.12g} at t={self.t:g} "
                f"(tolerance {c.norm_tolerance:g}); dt or taylor_order is too aggressive "
                f"for this field strength", self.t, norm)
        border = self.grid.border_max()
        if border > c.border_threshold:
            raise BorderBreachError(
                f"border amplitude {border:.3e} exceeds threshold {c.border_threshold:g} "
                f"at t={self.t:g}; enlarge the window", self.t, border)
        return norm, border


def evolve(config: SimulationConfig, *, impl: str = "auto",
           grid: AmplitudeGrid | None = None,
           hooks: Iterable[Hook] = ()) -> Stepper:
    """Propagate from t=0 to t_final, sampling every `sample_every` steps.

    Each hook is called as hook(t, grid) at t=0 and after every
    sample_every-th step; the grid argument is live state, so hooks must
    copy anything they keep. Invariants are checked at every sample time
    and at the end of the run. Returns the stepper holding the final
    state.
    """
    hooks = tuple(hooks)
    st = Stepper(config, impl=impl, grid=grid)
    st.check_invariants()
    for hook in hooks:
        hook(0.0, st.grid)
    n_steps = config.n_steps
    every = config.sample_every
    while st.step < n_steps:
        st.advance(min(every, n_steps - st.step))
        st.check_invariants()
        if st.step % every == 0:
            for hook in hooks:
                hook(st.t, st.grid)
    return st


def apply_hamiltonian(grid: AmplitudeGrid, u: float, f: float,
                      impl: str = "auto") -> AmplitudeGrid:
    """H applied to the state at a frozen field value, as a fresh grid."""
    k = kernels.get_kernel(impl)
    out = AmplitudeGrid.zeros(grid.window)
    k.apply_h_2d(out.padded, grid.padded, grid.window.n_min, u, f)
    return out


def taylor_step(grid: AmplitudeGrid, u: float, f: float, dt: float,
                order: int = 12, impl: str = "auto"):
    """One in-place propagation step with the field frozen at `f`."""
    k = kernels.get_kernel(impl)
    term = np.zeros_like(grid.padded)
    hterm = np.zeros_like(grid.padded)
    k.taylor_step_2d(grid.padded, term, hterm, grid.window.n_min, u, f, dt, order)


def evolve_1d(psi0: np.ndarray, window: LatticeWindow, drive: DriveParameters,
              t_final: float, *, dt: float = 1e-3, order: int = 12,
              field_eval: str = "midpoint", impl: str = "auto",
              sample_every: int = 0,
              hook: Callable[[float, np.ndarray], None] | None = None) -> np.ndarray:
    """One-particle propagation on the same window/field conventions.

    psi0 is an unpadded length-N complex vector. If `hook` is given it is
    called as hook(t, psi_view) at t=0 and every `sample_every` steps.
    Returns the final state as a fresh unpadded array.
    """
    n = window.size
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (n,):
        raise ConfigurationError(f"psi0 shape {psi0.shape} does not match window size {n}")
    if field_eval not in ("midpoint", "left"):
        raise ConfigurationError(f"field_eval must be 'midpoint' or 'left', got {field_eval!r}")
    k = kernels.get_kernel(impl)
    pad = np.zeros(n + 2, dtype=np.complex128)
    pad[1:-1] = psi0
    term = np.zeros_like(pad)
    hterm = np.zeros_like(pad)
    n_steps = int(np.floor(t_final / dt + 1e-9))
    shift = 0.5 * dt if field_eval == "midpoint" else 0.0
    if hook is not None:
        hook(0.0, pad[1:-1])
    for step in range(n_steps):
        f = drive.field_at(step * dt + shift)
        k.taylor_step_1d(pad, term, hterm, window.n_min, f, dt, order)
        if hook is not None and sample_every and (step + 1) % sample_every == 0:
            hook((step + 1) * dt, pad[1:-1])
    return pad[1:-1].copy()
