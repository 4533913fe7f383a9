"""Measured quantities: centroids, entanglement purity, pair correlations,
drift velocity, oscillation spectra, and the semiclassical predictor.

All functions are pure and operate on read-only snapshots; the
SeriesRecorder adapts them to the evolution hook interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import AmplitudeGrid, DriveParameters

__all__ = [
    "InsufficientSpanError",
    "centroid",
    "reduced_density",
    "purity",
    "state_purity",
    "PairCorrelation",
    "pair_correlation",
    "bessel_j1",
    "semiclassical_velocity",
    "ObservableSeries",
    "SeriesRecorder",
    "drift_velocity",
    "SpectrumResult",
    "centroid_spectrum",
]


class InsufficientSpanError(ValueError):
    """The sampled series is too short for the requested estimate."""


# --------------------------------------------------------------- pointwise

def centroid(grid: AmplitudeGrid) -> tuple[float, float]:
    """Mean position of each particle, (sum n1*|psi|^2, sum n2*|psi|^2)."""
    p = grid.probabilities()
    sites = grid.window.sites().astype(np.float64)
    return float(sites @ p.sum(axis=1)), float(sites @ p.sum(axis=0))


def reduced_density(grid: AmplitudeGrid) -> np.ndarray:
    """One-particle density matrix rho[n1, m1] = sum_n2 psi(n1,n2) psi*(m1,n2).

    Computed as the amplitude matrix times its conjugate transpose; the
    four-index contraction is never materialized.
    """
    a = grid.amp
    return a @ a.conj().T


def purity(rho: np.ndarray) -> float:
    """Tr rho^2 for Hermitian rho, as the squared Frobenius norm."""
    return float(np.sum(rho.real ** 2 + rho.imag ** 2))


def state_purity(grid: AmplitudeGrid) -> float:
    """Purity of the one-particle reduced state: 1 for products, 1/N floor."""
    return purity(reduced_density(grid))


class PairCorrelation(NamedTuple):
    covariance: float
    normalized: float  # NaN when the centroid product is below eps


def pair_correlation(grid: AmplitudeGrid, eps: float = 1e-6) -> PairCorrelation:
    """Position covariance <n1 n2> - <n1><n2> and its normalized form.

    The normalized correlation divides by <n1><n2>, which vanishes for
    packets launched at the origin; below `eps` it is reported as NaN
    while the raw covariance (which carries the bunching sign) is always
    defined.
    """
    p = grid.probabilities()
    sites = grid.window.sites().astype(np.float64)
    c1 = float(sites @ p.sum(axis=1))
    c2 = float(sites @ p.sum(axis=0))
    n1n2 = float(sites @ p @ sites)
    cov = n1n2 - c1 * c2
    denom = c1 * c2
    normalized = cov / denom if abs(denom) >= eps else math.nan
    return PairCorrelation(cov, normalized)


def pair_centroid(grid: AmplitudeGrid, width: int = 2) -> float:
    """Mean position of the bound (near-diagonal) component alone.

    Restricts the two-particle density to |n1 - n2| <= width — the same
    band the diagonal-mass diagnostic uses — renormalizes, and returns
    its first-particle centroid. A bound pair oscillates as a composite
    object, so this is the observable that isolates the pair's motion
    from any unbound background; the full-density centroid mixes in the
    unbound fraction, whose oscillation amplitude per unit probability
    is an order of magnitude larger. NaN when essentially no weight lies
    in the band.
    """
    p = grid.probabilities()
    sites = grid.window.sites().astype(np.float64)
    mask = np.abs(sites[:, None] - sites[None, :]) <= width
    banded = np.where(mask, p, 0.0)
    mass = banded.sum()
    if mass < 1e-12:
        return math.nan
    return float(sites @ banded.sum(axis=1) / mass)


# ------------------------------------------------------------- predictor

# Rational coefficients for the asymptotic form on [8, 50], from the
# Cephes math library (S. Moshier): J1(x) ~ sqrt(2/(pi x)) *
# [P(z) cos(xn) - (5/x) Q(z) sin(xn)], z = (5/x)^2, xn = x - 3pi/4.
_PP1 = (7.62125616208173112003e-4, 7.31397056940917570436e-2,
        1.12719608129684925192e0, 5.11207951146807644818e0,
        8.42404590141772420927e0, 5.21451598682361504063e0,
        1.00000000000000000254e0)
_PQ1 = (5.71323128072548699714e-4, 6.88455908754495404082e-2,
        1.10514232634061696926e0, 5.07386386128601488557e0,
        8.39985554327604159757e0, 5.20982848682361821619e0,
        9.99999999999999997461e-1)
_QP1 = (5.10862594750176621635e-2, 4.98213872951233449420e0,
        7.58238284132545283818e1, 3.66779609360150777800e2,
        7.10856304998926107277e2, 5.97489612400613639965e2,
        2.11688757100572135698e2, 2.52070205858023719784e1)
_QQ1 = (1.0, 7.42373277035675149943e1, 1.05644886038262816351e3,
        4.98641058337653607651e3, 9.56231892404756170795e3,
        7.99704160447350683650e3, 2.82619278517639096600e3,
        3.36093607810698293419e2)
_SQ2OPI = 0.79788456080286535588  # sqrt(2/pi)
_THPIO4 = 2.35619449019234492885  # 3*pi/4


def _polevl(x: float, coef) -> float:
    acc = coef[0]
    for c in coef[1:]:
        acc = acc * x + c
    return acc


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind, order 1, |x| <= 50.

    Power series below 8 (exact summation of the alternating terms),
    rational/asymptotic form above; absolute accuracy ~1e-13 or better
    over the validated domain.
    """
    ax = abs(x)
    if ax > 50.0:
        raise ValueError(f"bessel_j1 validated only for |x| <= 50, got {x}")
    if ax < 8.0:
        q = 0.25 * ax * ax
        term = 0.5 * ax
        terms = [term]
        for k in range(60):
            term *= -q / ((k + 1) * (k + 2))
            terms.append(term)
            if abs(term) < 1e-18 * (1.0 + abs(terms[0])):
                break
        val = math.fsum(terms)
    else:
        w = 5.0 / ax
        z = w * w
        p = _polevl(z, _PP1) / _polevl(z, _PQ1)
        qq = _polevl(z, _QP1) / _polevl(z, _QQ1)
        xn = ax - _THPIO4
        val = _SQ2OPI * (p * math.cos(xn) - w * qq * math.sin(xn)) / math.sqrt(ax)
    return -val if x < 0.0 else val


def semiclassical_velocity(f_ratio: float, phi: float) -> float:
    """Non-interacting resonant-drive drift prediction.

    v = 2 J1(f_ratio) cos(f_ratio cos(phi) - phi), f_ratio being the
    AC/DC field amplitude ratio. Zero at phi = +/- pi/2; signs follow
    this form literally (direction conventions differ across sources,
    magnitudes are what the estimator is validated against).
    """
    return 2.0 * bessel_j1(f_ratio) * math.cos(f_ratio * math.cos(phi) - phi)


# ---------------------------------------------------------------- series

@dataclass
class ObservableSeries:
    """Uniform record of per-sample observables along one run.

    correlation_normalized is NaN wherever the denominator was
    degenerate, and purity is NaN when recording ran without it.
    """

    t: np.ndarray
    centroid1: np.ndarray
    centroid2: np.ndarray
    norm: np.ndarray
    purity: np.ndarray
    covariance: np.ndarray
    correlation_normalized: np.ndarray
    border_max: np.ndarray

    COLUMNS = ("t", "centroid1", "centroid2", "norm", "purity",
               "covariance", "correlation_normalized", "border_max")

    def __post_init__(self):
        for name in self.COLUMNS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        n = len(self.t)
        for name in self.COLUMNS[1:]:
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has {len(getattr(self, name))} rows, expected {n}")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    @classmethod
    def from_centroid(cls, t, centroid1, centroid2=None) -> "ObservableSeries":
        """Series with only centroid content, for estimator tests and plots."""
        t = np.asarray(t, dtype=np.float64)
        c1 = np.asarray(centroid1, dtype=np.float64)
        c2 = c1 if centroid2 is None else np.asarray(centroid2, dtype=np.float64)
        ones = np.ones_like(t)
        zeros = np.zeros_like(t)
        return cls(t, c1, c2, ones, ones, zeros, np.full_like(t, math.nan), zeros)


class SeriesRecorder:
    """Evolution hook that accumulates an ObservableSeries.

    Purity costs an N^3 matrix product per sample; pass with_purity=False
    for sweep runs that only need centroids (the column is then NaN).
    """

    def __init__(self, with_purity: bool = True, eps: float = 1e-6):
        self.with_purity = with_purity
        self.eps = eps
        self._rows: list[tuple[float, ...]] = []

    def __call__(self, t: float, grid: AmplitudeGrid):
        c1, c2 = centroid(grid)
        cov, corr = pair_correlation(grid, eps=self.eps)
        p = state_purity(grid) if self.with_purity else math.nan
        self._rows.append((t, c1, c2, grid.norm_sq(), p, cov, corr, grid.border_max()))

    def series(self) -> ObservableSeries:
        cols = list(zip(*self._rows)) if self._rows else [[] for _ in ObservableSeries.COLUMNS]
        return ObservableSeries(*[np.asarray(c, dtype=np.float64) for c in cols])


# ------------------------------------------------------------ estimators

def drift_velocity(series: ObservableSeries, drive: DriveParameters,
                   skip_periods: int = 1) -> float:
    """Net centroid velocity: least-squares slope through stroboscopic samples.

    centroid1 is resampled at t_k = t_0 + k*T by linear interpolation, the
    first `skip_periods` strides are dropped as transient, and a straight
    line is fit through the rest. T is the slowest locked period of the
    dynamics: the DC Bloch period 2*pi/f0 when a DC tilt is present
    (unbound components oscillate at the Bloch frequency even when the
    drive runs at twice it, and sampling at the shorter drive period
    aliases that subharmonic into a spurious slope), otherwise the drive
    period.
    """
    if drive.f0 > 0.0:
        period = 2.0 * math.pi / drive.f0
    else:
        period = drive.period
    t0, t_end = float(series.t[0]), float(series.t[-1])
    span = t_end - t0
    need = (skip_periods + 3) * period
    if span + 1e-9 < need:
        raise InsufficientSpanError(
            f"series spans {span:g} time units; need at least {need:g} "
            f"({skip_periods} skipped + 3 fitted periods of T={period:g})")
    k_max = int(math.floor(span / period + 1e-9))
    tk = t0 + period * np.arange(skip_periods, k_max + 1)
    xk = np.interp(tk, series.t, series.centroid1)
    tc = tk - tk.mean()
    return float(np.dot(tc, xk - xk.mean()) / np.dot(tc, tc))


class SpectrumResult(NamedTuple):
    frequencies: np.ndarray  # angular frequency per bin
    magnitudes: np.ndarray
    dominant: float          # peak bin refined by quadratic interpolation


def centroid_spectrum(series: ObservableSeries, min_cycles: float = 5.0) -> SpectrumResult:
    """Magnitude spectrum of the mean-removed, Hann-windowed centroid.

    Frequencies are angular (a drive at omega peaks at omega). The span
    must cover at least `min_cycles` periods of the dominant component,
    otherwise the peak location is leakage-dominated and an error is
    raised.
    """
    t = series.t
    n = len(t)
    if n < 16:
        raise InsufficientSpanError(f"need at least 16 samples, got {n}")
    dtau = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dtau, rtol=1e-6, atol=1e-12):
        raise InsufficientSpanError("spectrum requires uniform sampling")
    y = (series.centroid1 - series.centroid1.mean()) * np.hanning(n)
    mags = np.abs(np.fft.rfft(y))
    freqs = 2.0 * math.pi * np.fft.rfftfreq(n, d=dtau)
    # skip the DC shoulder (bins 0-1 carry mean-removal leakage)
    k = 2 + int(np.argmax(mags[2:]))
    if 0 < k < len(mags) - 1:
        a, b, c = mags[k - 1], mags[k], mags[k + 1]
        denom = a - 2.0 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0.0 else 0.0
    else:
        shift = 0.0
    dominant = (k + shift) * (freqs[1] - freqs[0])
    span = float(t[-1] - t[0])
    if dominant * span < min_cycles * 2.0 * math.pi:
        raise InsufficientSpanError(
            f"span {span:g} covers fewer than {min_cycles:g} cycles of the "
            f"dominant component at {dominant:g}")
    return SpectrumResult(freqs, mags, float(dominant))
