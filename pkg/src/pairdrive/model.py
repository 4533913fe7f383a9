"""Domain types, units convention and initial states.

Everything is expressed in the natural units e = d = J = hbar = 1: site
indices are integers, field amplitudes are measured in units of the
hopping energy per site spacing, and time in units of hbar/J. The
two-particle state lives on a square window of the chain, amp[i, j]
being the amplitude for particle 1 at site n_min + i and particle 2 at
site n_min + j.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ConfigurationError",
    "LatticeWindow",
    "DriveParameters",
    "StateKind",
    "InitialStateSpec",
    "SimulationConfig",
    "AmplitudeGrid",
    "build_gaussian",
    "build_fock",
    "build_initial_state",
    "field_at",
    "default_window",
]


class ConfigurationError(ValueError):
    """A parameter set violates one of its declared constraints."""


@dataclass(frozen=True)
class LatticeWindow:
    """Contiguous range of site indices, used for both particle coordinates.

    Amplitudes outside the window are implicitly zero; the propagator
    relies on them staying negligible (see border monitoring).
    """

    n_min: int
    n_max: int

    def __post_init__(self):
        if self.n_min >= self.n_max:
            raise ConfigurationError(f"window requires n_min < n_max, got [{self.n_min}, {self.n_max}]")
        if self.size < 3:
            raise ConfigurationError(f"window must span at least 3 sites, got {self.size}")

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    def sites(self) -> np.ndarray:
        """Site indices as an int array of length `size`."""
        return np.arange(self.n_min, self.n_max + 1)

    def contains(self, n: int) -> bool:
        return self.n_min <= n <= self.n_max


@dataclass(frozen=True)
class DriveParameters:
    """Field F(t) = f0 + f_omega * sin(omega * t + phi).

    f0 is the DC amplitude, f_omega / omega / phi describe the AC part.
    The sine form fixes the meaning of phi: with positive hopping, resonant
    transport at omega = f0 vanishes for phi = +-pi/2 and is extremal at the
    self-consistent phases phi = (f_omega/f0)*cos(phi) and pi minus that.
    All phase values accepted elsewhere in the package use this convention.
    """

    f0: float
    f_omega: float = 0.0
    omega: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.f_omega != 0.0 and self.omega <= 0.0:
            raise ConfigurationError("omega must be positive when an AC component is present")

    @property
    def period(self) -> float:
        """AC period 2*pi/omega."""
        if self.omega <= 0.0:
            raise ConfigurationError("period undefined for a DC-only drive")
        return 2.0 * math.pi / self.omega

    def field_at(self, t: float) -> float:
        """Instantaneous field value F(t)."""
        return self.f0 + self.f_omega * math.sin(self.omega * t + self.phi)

    @classmethod
    def resonant(cls, preset: str, f0: float = 0.6, f_omega: float | None = None,
                 phi: float = 0.0) -> "DriveParameters":
        """Drive with omega locked to a resonance of the DC field.

        preset "fundamental" sets omega = f0 (single-particle Bloch
        frequency), "doubled" sets omega = 2*f0 (bound-pair frequency).
        f_omega defaults to 0.8*f0.
        """
        if preset not in ("fundamental", "doubled"):
            raise ConfigurationError(f"unknown resonance preset {preset!r}")
        if f0 <= 0.0:
            raise ConfigurationError("resonant drive requires f0 > 0")
        if f_omega is None:
            f_omega = 0.8 * f0
        omega = f0 if preset == "fundamental" else 2.0 * f0
        return cls(f0=f0, f_omega=f_omega, omega=omega, phi=phi)


def field_at(drive: DriveParameters, t: float) -> float:
    """Module-level alias for DriveParameters.field_at."""
    return drive.field_at(t)


class StateKind(enum.Enum):
    GAUSSIAN = "gaussian"
    FOCK = "fock"


@dataclass(frozen=True)
class InitialStateSpec:
    """Unentangled initial state: a Gaussian product packet or a Fock state.

    sigma_cap is the squared-width parameter of the Gaussian envelope
    exp(-(n - n0)^2 / sigma_cap) per coordinate (4 sigma^2 in terms of the
    usual standard deviation); it is ignored for Fock states.
    """

    kind: StateKind
    center: tuple[int, int] = (0, 0)
    sigma_cap: float = 0.0

    def __post_init__(self):
        if self.kind is StateKind.GAUSSIAN and self.sigma_cap <= 0.0:
            raise ConfigurationError("gaussian state requires sigma_cap > 0")

    @property
    def sigma(self) -> float:
        """Standard-deviation-like width sqrt(sigma_cap)/2 (0 for Fock)."""
        if self.kind is StateKind.FOCK:
            return 0.0
        return math.sqrt(self.sigma_cap) / 2.0


@dataclass(frozen=True)
class SimulationConfig:
    """Complete recipe for one propagation run."""

    window: LatticeWindow
    u: float
    drive: DriveParameters
    initial: InitialStateSpec
    t_final: float
    dt: float = 1e-3
    taylor_order: int = 12
    sample_every: int = 100
    border_threshold: float = 1e-10
    norm_tolerance: float = 1e-8
    field_eval: str = "midpoint"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.taylor_order < 1:
            raise ConfigurationError(f"taylor_order must be >= 1, got {self.taylor_order}")
        if self.t_final <= 0.0:
            raise ConfigurationError(f"t_final must be positive, got {self.t_final}")
        if self.sample_every < 1:
            raise ConfigurationError(f"sample_every must be >= 1, got {self.sample_every}")
        if self.border_threshold <= 0.0:
            raise ConfigurationError("border_threshold must be positive")
        if self.field_eval not in ("midpoint", "left"):
            raise ConfigurationError(f"field_eval must be 'midpoint' or 'left', got {self.field_eval!r}")

    @property
    def n_steps(self) -> int:
        """Number of dt-steps covering [0, t_final]."""
        return int(math.floor(self.t_final / self.dt + 1e-9))

    def step_field(self, step: int) -> float:
        """Field value frozen for step `step` (midpoint rule by default)."""
        t = step * self.dt
        if self.field_eval == "midpoint":
            t += 0.5 * self.dt
        return self.drive.field_at(t)

    def with_(self, **changes) -> "SimulationConfig":
        """Copy with the given fields replaced."""
        return replace(self, **changes)


class AmplitudeGrid:
    """Two-particle amplitudes psi[n1, n2] on a square site window.

    Storage is padded by one zero cell per side so the propagation
    kernels can run branch-free; `amp` is the live N x N interior view.
    The grid is mutable (the stepper advances it in place) but single
    writer; take copies for snapshots.
    """

    __slots__ = ("window", "_padded")

    def __init__(self, window: LatticeWindow, padded: np.ndarray):
        self.window = window
        self._padded = padded

    @classmethod
    def zeros(cls, window: LatticeWindow) -> "AmplitudeGrid":
        n = window.size
        return cls(window, np.zeros((n + 2, n + 2), dtype=np.complex128))

    @classmethod
    def from_amplitudes(cls, window: LatticeWindow, amp: np.ndarray) -> "AmplitudeGrid":
        """Copy an N x N complex array into a fresh padded grid."""
        n = window.size
        amp = np.asarray(amp, dtype=np.complex128)
        if amp.shape != (n, n):
            raise ConfigurationError(f"amplitude array shape {amp.shape} does not match window size {n}")
        g = cls.zeros(window)
        g.amp[:, :] = amp
        return g

    @property
    def amp(self) -> np.ndarray:
        """Interior N x N amplitude view (writable)."""
        return self._padded[1:-1, 1:-1]

    @property
    def padded(self) -> np.ndarray:
        """Padded storage, for the kernels."""
        return self._padded

    def copy(self) -> "AmplitudeGrid":
        return AmplitudeGrid(self.window, self._padded.copy())

    def norm_sq(self) -> float:
        """Total probability sum |psi|^2."""
        return float(np.sum(np.abs(self._padded) ** 2))

    def border_max(self) -> float:
        """Largest |psi| on the outermost interior row/column."""
        a = self.amp
        return float(max(np.max(np.abs(a[0, :])), np.max(np.abs(a[-1, :])),
                         np.max(np.abs(a[:, 0])), np.max(np.abs(a[:, -1]))))

    def probabilities(self) -> np.ndarray:
        """|psi|^2 on the interior grid (fresh array)."""
        a = self.amp
        return (a.real * a.real + a.imag * a.imag)


def _check_margin(center: tuple[int, int], window: LatticeWindow, need: float, kind: str):
    for which, c in (("particle 1", center[0]), ("particle 2", center[1])):
        lo = c - window.n_min
        hi = window.n_max - c
        if lo < need:
            raise ConfigurationError(
                f"{kind} center for {which} at site {c} sits {lo} sites from the n_min={window.n_min} "
                f"edge; at least {need:g} required")
        if hi < need:
            raise ConfigurationError(
                f"{kind} center for {which} at site {c} sits {hi} sites from the n_max={window.n_max} "
                f"edge; at least {need:g} required")


def build_gaussian(spec: InitialStateSpec, window: LatticeWindow) -> AmplitudeGrid:
    """Normalized product of two one-particle Gaussian packets.

    amp[n1, n2] = exp(-[(n1 - c1)^2 + (n2 - c2)^2] / sigma_cap) / A with A
    fixed by explicit summation over the window, so the discrete norm is
    exactly 1 in finite precision.
    """
    if spec.kind is not StateKind.GAUSSIAN:
        raise ConfigurationError(f"expected a gaussian state spec, got {spec.kind}")
    _check_margin(spec.center, window, 3.0 * spec.sigma + 2.0, "gaussian")
    sites = window.sites().astype(np.float64)
    g1 = np.exp(-((sites - spec.center[0]) ** 2) / spec.sigma_cap)
    g2 = np.exp(-((sites - spec.center[1]) ** 2) / spec.sigma_cap)
    amp = np.outer(g1, g2)
    amp /= np.sqrt(np.sum(amp * amp))
    return AmplitudeGrid.from_amplitudes(window, amp)


def build_fock(spec: InitialStateSpec, window: LatticeWindow) -> AmplitudeGrid:
    """Single-configuration state: unit amplitude at the center pair."""
    if spec.kind is not StateKind.FOCK:
        raise ConfigurationError(f"expected a fock state spec, got {spec.kind}")
    _check_margin(spec.center, window, 2.0, "fock")
    g = AmplitudeGrid.zeros(window)
    g.amp[spec.center[0] - window.n_min, spec.center[1] - window.n_min] = 1.0
    return g


def build_initial_state(spec: InitialStateSpec, window: LatticeWindow) -> AmplitudeGrid:
    """Dispatch to the builder for the spec's kind."""
    if spec.kind is StateKind.GAUSSIAN:
        return build_gaussian(spec, window)
    return build_fock(spec, window)


def gaussian_margin(sigma_cap: float, border_threshold: float) -> int:
    """Sites needed between a Gaussian center and a window edge so the
    envelope's tail sits below the border threshold, with slack."""
    return int(math.ceil(math.sqrt(sigma_cap * math.log(1.0 / border_threshold)))) + 4


def default_window(initial: InitialStateSpec, t_final: float,
                   border_threshold: float = 1e-10) -> LatticeWindow:
    """Conservative window: ballistic reach of 2 sites per unit time per
    coordinate from the centers, plus a tail margin.

    Deliberately generous; the field localizes real dynamics well inside
    it. Scenario presets override it with tuned extents, and the border
    monitor catches any window that turns out too small.
    """
    reach = int(math.ceil(2.0 * t_final))
    if initial.kind is StateKind.GAUSSIAN:
        margin = max(gaussian_margin(initial.sigma_cap, border_threshold),
                     int(math.ceil(3.0 * initial.sigma)) + 2)
    else:
        margin = 4
    lo = min(initial.center) - reach - margin
    hi = max(initial.center) + reach + margin
    return LatticeWindow(lo, hi)
