"""End-to-end acceptance battery: eleven quantitative checks, one test each.

Every test's docstring states the protocol and the numeric bound it
enforces. The expensive propagations are shared through module-scoped
fixtures; the norm drift of every production run is logged as a side
effect and judged in one place (test_c02, defined last so it sees the
complete log). The full battery is CPU-bound and takes on the order of
forty minutes single-threaded; run it with

    pytest tests/test_acceptance.py -v

All runs use the shipped defaults dt=1e-3 and Taylor order 12, drive
amplitudes f0=0.6, f_omega=0.48, and a width-20 Gaussian pair state
unless a check calls for a Fock start. Drift fits use one settling
stride (skip_periods=1).
"""

import math

import numpy as np
import pytest

pytestmark = pytest.mark.slow

from pairdrive.dynamics import evolve, evolve_1d
from pairdrive.model import (
    AmplitudeGrid,
    DriveParameters,
    InitialStateSpec,
    LatticeWindow,
    SimulationConfig,
    StateKind,
)
from pairdrive.observables import (
    ObservableSeries,
    SeriesRecorder,
    centroid_spectrum,
    drift_velocity,
    pair_centroid,
    state_purity,
)
from pairdrive.oracle import literal_purity
from pairdrive.runner import load_spec, run_experiment, run_validation

PHI_STAR = 2.5008          # self-consistent extremal phase of the ac drive
US = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0)

_GAUSS = InitialStateSpec(StateKind.GAUSSIAN, (0, 0), 20.0)
_FOCK00 = InitialStateSpec(StateKind.FOCK, (0, 0))

# (label, max |norm - 1| over the run) for every propagation this module
# performs; judged by test_c02 at the end.
_NORM_LOG: list[tuple[str, float]] = []


def _fund(phi: float) -> DriveParameters:
    return DriveParameters.resonant("fundamental", phi=phi)


def _dbl(phi: float) -> DriveParameters:
    return DriveParameters.resonant("doubled", phi=phi)


def _run(label, *, window, u, drive, initial, t_final, sample_every=100,
         with_purity=False, extra_hooks=()) -> ObservableSeries:
    rec = SeriesRecorder(with_purity=with_purity)
    cfg = SimulationConfig(window=window, u=u, drive=drive, initial=initial,
                           t_final=t_final, sample_every=sample_every)
    evolve(cfg, hooks=(rec, *extra_hooks))
    series = rec.series()
    _NORM_LOG.append((label, float(np.max(np.abs(series.norm - 1.0)))))
    return series


# ------------------------------------------------------------- fixtures


@pytest.fixture(scope="module")
def c3_series() -> ObservableSeries:
    """Free pair, fundamental resonance at the extremal phase."""
    return _run("fundamental u=0 phi=2.5008",
                window=LatticeWindow(-70, 120), u=0.0, drive=_fund(PHI_STAR),
                initial=_GAUSS, t_final=52.4)


@pytest.fixture(scope="module")
def doubled_sweep_u3() -> dict[int, float]:
    """Drift velocity at 16 evenly spaced phases, doubled resonance, u=3."""
    out = {}
    for k in range(16):
        phi = k * math.pi / 8.0
        drive = _dbl(phi)
        s = _run(f"doubled u=3 phi={phi:.4f}",
                 window=LatticeWindow(-85, 85), u=3.0, drive=drive,
                 initial=_GAUSS, t_final=63.0)
        out[k] = float(drift_velocity(s, drive, skip_periods=1))
    return out


@pytest.fixture(scope="module")
def doubled_sweep_u0() -> dict[int, float]:
    """Same 16-phase sweep without interaction (shorter horizon: the
    free sweep needs only enough span for the fit, and drifts nowhere)."""
    out = {}
    for k in range(16):
        phi = k * math.pi / 8.0
        drive = _dbl(phi)
        s = _run(f"doubled u=0 phi={phi:.4f}",
                 window=LatticeWindow(-60, 60), u=0.0, drive=drive,
                 initial=_GAUSS, t_final=42.0)
        out[k] = float(drift_velocity(s, drive, skip_periods=1))
    return out


@pytest.fixture(scope="module")
def doubled_ugrid() -> dict[float, float]:
    """|v(u)| at the extremal phase under the doubled preset."""
    out = {}
    for u in US:
        s = _run(f"doubled u={u:g} phi=2.5008",
                 window=LatticeWindow(-85, 85), u=u, drive=_dbl(PHI_STAR),
                 initial=_GAUSS, t_final=63.0)
        out[u] = abs(float(drift_velocity(s, _dbl(PHI_STAR), skip_periods=1)))
    return out


@pytest.fixture(scope="module")
def fund_ugrid(c3_series) -> dict[float, float]:
    """|v(u)| at the extremal phase under the fundamental preset; the u=0
    point reuses the free-streaming run."""
    out = {0.0: abs(float(drift_velocity(c3_series, _fund(PHI_STAR),
                                         skip_periods=1)))}
    for u in US[1:]:
        s = _run(f"fundamental u={u:g} phi=2.5008",
                 window=LatticeWindow(-100, 100), u=u, drive=_fund(PHI_STAR),
                 initial=_GAUSS, t_final=52.4)
        out[u] = abs(float(drift_velocity(s, _fund(PHI_STAR), skip_periods=1)))
    return out


@pytest.fixture(scope="module")
def fund_pi2_series() -> ObservableSeries:
    """Fundamental resonance at phi=pi/2, u=3, long horizon, with purity.

    The quadrature phase makes the field an even function of time, so any
    apparent drift is a decaying transient; the long horizon lets the fit
    settle. Purity is sampled sparsely (every 0.5 time units) because the
    reduced density matrix costs N^3 per sample on this wide window.
    """
    return _run("fundamental u=3 phi=pi/2",
                window=LatticeWindow(-155, 155), u=3.0,
                drive=_fund(math.pi / 2), initial=_GAUSS, t_final=105.0,
                sample_every=500, with_purity=True)


@pytest.fixture(scope="module")
def entangle_series() -> dict[float, ObservableSeries]:
    """Doubled resonance, u=3, purity and covariance tracked, three phases."""
    out = {}
    for phi in (math.pi / 2, 2.0, 2.5):
        out[phi] = _run(f"doubled u=3 phi={phi:.4f} (purity)",
                        window=LatticeWindow(-80, 80), u=3.0, drive=_dbl(phi),
                        initial=_GAUSS, t_final=63.0, with_purity=True)
    return out


@pytest.fixture(scope="module")
def fock_series() -> ObservableSeries:
    """Same-site pair released into the resonant doubled drive."""
    return _run("fock(0,0) u=3 doubled phi=2.5",
                window=LatticeWindow(-70, 70), u=3.0, drive=_dbl(2.5),
                initial=_FOCK00, t_final=63.0)


@pytest.fixture(scope="module")
def single_dc_series() -> ObservableSeries:
    """One particle under a pure dc tilt: centroid sampled from the 1d path."""
    window = LatticeWindow(-45, 45)
    sites = np.asarray(window.sites(), dtype=np.float64)
    sigma = 5.0
    psi0 = np.exp(-sites**2 / (4.0 * sigma**2)).astype(np.complex128)
    psi0 /= np.linalg.norm(psi0)
    ts, cs, norms = [], [], []

    def hook(t, psi):
        w = np.abs(psi) ** 2
        n = float(w.sum())
        ts.append(float(t))
        cs.append(float(sites @ w / n))
        norms.append(math.sqrt(n))

    evolve_1d(psi0, window, DriveParameters(0.6), 105.0,
              sample_every=100, hook=hook)
    _NORM_LOG.append(("dc one-particle",
                      float(np.max(np.abs(np.asarray(norms) - 1.0)))))
    return ObservableSeries.from_centroid(np.asarray(ts), np.asarray(cs))


@pytest.fixture(scope="module")
def pair_dc_series() -> ObservableSeries:
    """Tightly bound pair (u=10) under the same dc tilt; the tracked
    coordinate is the bound-sector pair centroid."""
    ts, pcs = [], []

    def hook(t, grid):
        ts.append(float(t))
        pcs.append(pair_centroid(grid))

    _run("dc bound pair u=10", window=LatticeWindow(-25, 25), u=10.0,
         drive=DriveParameters(0.6), initial=_FOCK00, t_final=105.0,
         extra_hooks=(hook,))
    return ObservableSeries.from_centroid(np.asarray(ts), np.asarray(pcs))


# ---------------------------------------------------------------- tests


def test_c01_cross_method_agreement():
    """Dense matrix-exponential reference vs the production stepper on a
    9x9 window for u in {0, 3, 10}, both resonant presets, three phases,
    to t=5: maximum amplitude deviation < 1e-8 (plus the bundled purity
    and separability cross-checks at their own tighter bounds)."""
    results = run_validation(t_final=5.0)
    failed = [f"{r.name}: {r.deviation:.3e} (tol {r.tolerance:.0e})"
              for r in results if not r.passed]
    worst = max(r.deviation for r in results)
    assert not failed and worst < 1e-8, failed


def test_c03_free_streaming_speed(c3_series):
    """Free pair, fundamental resonance, extremal phase: fitted drift
    speed within 5% of 0.73768 (twice the one-particle value that two
    independent particles share)."""
    v = float(drift_velocity(c3_series, _fund(PHI_STAR), skip_periods=1))
    ref = 0.73768
    assert abs(abs(v) - ref) <= 0.05 * ref, f"measured v = {v:+.5f}"


def test_c04_quadrature_phase_null(fund_pi2_series, doubled_sweep_u3):
    """At phi = pi/2 the drift vanishes for u=3 under both presets:
    |v| < 0.01 each."""
    v_f = float(drift_velocity(fund_pi2_series, _fund(math.pi / 2),
                               skip_periods=1))
    v_d = doubled_sweep_u3[4]  # k=4 on the pi/8 grid is exactly pi/2
    assert abs(v_f) < 0.01, f"fundamental preset: v = {v_f:+.5f}"
    assert abs(v_d) < 0.01, f"doubled preset: v = {v_d:+.5f}"


def test_c05_interaction_gated_transport(doubled_sweep_u3, doubled_sweep_u0):
    """16-phase sweep at the doubled resonance: without interaction the
    drift stays below 0.01 everywhere; at u=3 some phase exceeds 0.1."""
    v0 = max(abs(v) for v in doubled_sweep_u0.values())
    v3 = max(abs(v) for v in doubled_sweep_u3.values())
    assert v0 < 0.01, f"u=0 sweep: max |v| = {v0:.5f}"
    assert v3 > 0.1, f"u=3 sweep: max |v| = {v3:.5f}"


def test_c06_u_dependence_shape(doubled_ugrid, fund_ugrid):
    """|v(u)| over u in {0, 0.5, 1, 2, 3, 4, 6, 8} at the extremal phase:
    the doubled preset peaks at an interior u, the fundamental preset
    dips at an interior u, both resolved beyond a 0.01 margin."""
    dv = [doubled_ugrid[u] for u in US]
    i = max(range(len(US)), key=lambda j: dv[j])
    assert 0 < i < len(US) - 1, f"doubled |v| maximal at edge u={US[i]:g}: {dv}"
    assert dv[i] > dv[0] + 0.01 and dv[i] > dv[-1] + 0.01, \
        f"doubled peak at u={US[i]:g} not resolved: {dv}"
    fv = [fund_ugrid[u] for u in US]
    j = min(range(len(US)), key=lambda k: fv[k])
    assert 0 < j < len(US) - 1, f"fundamental |v| minimal at edge u={US[j]:g}: {fv}"
    assert fv[j] < fv[0] - 0.01 and fv[j] < fv[-1] - 0.01, \
        f"fundamental dip at u={US[j]:g} not resolved: {fv}"


def test_c07_entanglement_growth(entangle_series, fund_pi2_series):
    """Doubled resonance, u=3, phases {pi/2, 2.0, 2.5}: single-particle
    purity decreases across quarters, P(t_f) < P(t_f/4) < 1; under the
    fundamental preset at pi/2 it flattens late, |P(t_f) - P(3t_f/4)| <
    0.02; and the centroid covariance is positive at every sample beyond
    the first drive period."""
    for phi, s in entangle_series.items():
        p_quarter = float(np.interp(s.t[-1] / 4.0, s.t, s.purity))
        p_final = float(s.purity[-1])
        assert p_final < p_quarter < 1.0, \
            f"phi={phi:.4f}: P(t_f)={p_final:.4f}, P(t_f/4)={p_quarter:.4f}"

    s = fund_pi2_series
    p_end = float(s.purity[-1])
    p_3q = float(np.interp(0.75 * s.t[-1], s.t, s.purity))
    assert abs(p_end - p_3q) < 0.02, \
        f"late purity still moving: |P(t_f) - P(3t_f/4)| = {abs(p_end - p_3q):.4f}"

    mins = {f"{phi:.4f}": float(np.min(se.covariance[se.t > _dbl(phi).period]))
            for phi, se in entangle_series.items()}
    bad = {phi: round(m, 3) for phi, m in mins.items() if m <= 0.0}
    assert not bad, (
        f"covariance dips non-positive after the first drive period at "
        f"phi(s) {bad}; minima over all three phases: "
        f"{ {phi: round(m, 3) for phi, m in mins.items()} }")


def test_c08_pair_pinning(fock_series):
    """Same-site pair, u=3, doubled resonance at phi=2.5: the
    single-particle centroid stays within 0.5 sites of its start at
    every sampled time."""
    s = fock_series
    exc = np.abs(s.centroid1 - s.centroid1[0])
    i = int(np.argmax(exc))
    net = float(s.centroid1[-1] - s.centroid1[0])
    assert float(exc[i]) < 0.5, (
        f"max excursion {float(exc[i]):.4f} sites at t={float(s.t[i]):.1f} "
        f"(net end-to-end displacement {net:+.4f} sites)")


def test_c09_characteristic_frequencies(single_dc_series, pair_dc_series):
    """Pure dc tilt f0=0.6: the one-particle centroid oscillates at 0.6
    and the u=10 bound-pair centroid at 1.2, each within 2%."""
    f1 = centroid_spectrum(single_dc_series).dominant
    assert abs(f1 - 0.6) <= 0.02 * 0.6, f"one-particle line at {f1:.5f}"
    f2 = centroid_spectrum(pair_dc_series).dominant
    assert abs(f2 - 1.2) <= 0.02 * 1.2, f"pair line at {f2:.5f}"


def test_c10_purity_identity():
    """Matrix-product purity agrees with the literal four-index sum to
    1e-12 on 50 normalized random 12x12 amplitude grids."""
    rng = np.random.default_rng(812)
    window = LatticeWindow(-6, 5)
    worst = 0.0
    for _ in range(50):
        a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        g = AmplitudeGrid.from_amplitudes(window, a / np.linalg.norm(a))
        worst = max(worst, abs(state_purity(g) - literal_purity(g)))
    assert worst < 1e-12, f"worst |fast - literal| = {worst:.3e}"


def test_c11_thread_count_determinism(tmp_path):
    """A three-point phase-sweep experiment emits byte-identical CSV
    files when executed with 1 and with 3 worker threads."""
    spec_path = tmp_path / "sweep.toml"
    spec_path.write_text(
        'scenario = "phase_sweep"\n'
        'sweep_values = [0.0, 1.3, 2.5008]\n'
        'omega_presets = ["doubled"]\n'
        'skip_periods = 0\n'
        '\n'
        '[base]\n'
        'u = 3.0\n'
        't_final = 4.0\n'
        '\n'
        '[base.drive]\n'
        'f0 = 6.0\n'
        'f_omega = 4.8\n'
        'phi = 2.5008\n'
        '\n'
        '[base.initial]\n'
        'kind = "gaussian"\n'
        'center = [0, 0]\n'
        'sigma_cap = 4.0\n'
    )
    spec = load_spec(spec_path)
    payloads = {}
    for threads in (1, 3):
        out = tmp_path / f"threads{threads}"
        run_experiment(spec, threads=threads, out_dir=out)
        payloads[threads] = {p.name: p.read_bytes()
                             for p in sorted(out.glob("*.csv"))}
    assert payloads[1] and payloads[1].keys() == payloads[3].keys()
    for name, blob in payloads[1].items():
        assert blob == payloads[3][name], f"{name} differs between thread counts"


# Defined last: by now every fixture above has propagated and logged.
def test_c02_norm_conservation(c3_series, doubled_sweep_u3, doubled_sweep_u0,
                               doubled_ugrid, fund_ugrid, fund_pi2_series,
                               entangle_series, fock_series,
                               single_dc_series, pair_dc_series):
    """Every production run in this battery conserves the norm to
    |<psi|psi> - 1| < 1e-10 at every sample."""
    assert _NORM_LOG, "no runs registered"
    label, worst = max(_NORM_LOG, key=lambda kv: kv[1])
    assert worst < 1e-10, \
        f"worst drift {worst:.3e} in run '{label}' (of {len(_NORM_LOG)} runs)"
