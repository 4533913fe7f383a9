"""Domain-type tests: windows, drives, initial states."""

import math

import numpy as np
import pytest

from pairdrive.model import (
    AmplitudeGrid,
    ConfigurationError,
    DriveParameters,
    InitialStateSpec,
    LatticeWindow,
    SimulationConfig,
    StateKind,
    build_fock,
    build_gaussian,
    build_initial_state,
    default_window,
)


# ---------------------------------------------------------------- window

def test_window_size_and_sites():
    w = LatticeWindow(-3, 4)
    assert w.size == 8
    assert list(w.sites()) == [-3, -2, -1, 0, 1, 2, 3, 4]
    assert w.contains(-3) and w.contains(4)
    assert not w.contains(5) and not w.contains(-4)


def test_window_rejects_degenerate():
    with pytest.raises(ConfigurationError):
        LatticeWindow(2, 2)
    with pytest.raises(ConfigurationError):
        LatticeWindow(5, -5)
    with pytest.raises(ConfigurationError):
        LatticeWindow(0, 1)  # only 2 sites


# ---------------------------------------------------------------- drive

def test_field_at_dc_plus_ac():
    # phase 0 kills the AC part at t = 0
    d = DriveParameters(f0=0.6, f_omega=0.48, omega=0.6, phi=0.0)
    assert math.isclose(d.field_at(0.0), 0.6, rel_tol=0, abs_tol=1e-15)
    # phase pi/2 puts the AC part at its crest at t = 0
    d2 = DriveParameters(f0=0.6, f_omega=0.48, omega=0.6, phi=math.pi / 2)
    assert math.isclose(d2.field_at(0.0), 1.08, abs_tol=1e-15)


def test_field_periodicity():
    d = DriveParameters(f0=0.6, f_omega=0.48, omega=1.2, phi=0.3)
    t = 0.7134
    assert math.isclose(d.field_at(t + d.period), d.field_at(t), rel_tol=1e-12)


def test_field_at_random_arguments():
    rng = np.random.default_rng(42)
    for _ in range(10_000):
        f0, fw, om, phi, t = rng.uniform(-3, 3, size=5)
        om = abs(om) + 0.1
        d = DriveParameters(f0=f0, f_omega=fw, omega=om, phi=phi)
        assert d.field_at(t) == f0 + fw * math.sin(om * t + phi)


def test_resonant_presets():
    d = DriveParameters.resonant("fundamental")
    assert (d.f0, d.omega, d.f_omega) == (0.6, 0.6, pytest.approx(0.48))
    d = DriveParameters.resonant("doubled", phi=2.5)
    assert (d.omega, d.phi) == (1.2, 2.5)
    with pytest.raises(ConfigurationError):
        DriveParameters.resonant("tripled")


def test_ac_needs_positive_omega():
    with pytest.raises(ConfigurationError):
        DriveParameters(f0=0.6, f_omega=0.48, omega=0.0)
    # DC-only is fine with omega unset
    DriveParameters(f0=0.6)


# ---------------------------------------------------------------- gaussian

def test_gaussian_ratio_matches_envelope():
    # amp(n1=1, n2=0) / amp(0, 0) = exp(-1/sigma_cap) for sigma_cap = 10
    w = LatticeWindow(-20, 20)
    spec = InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=10.0)
    g = build_gaussian(spec, w)
    i0 = -w.n_min
    ratio = g.amp[i0 + 1, i0] / g.amp[i0, i0]
    assert abs(ratio - math.exp(-0.1)) < 1e-12
    assert abs(ratio - 0.904837) < 1e-6


def test_gaussian_normalized():
    w = LatticeWindow(-30, 30)
    spec = InitialStateSpec(StateKind.GAUSSIAN, center=(2, -1), sigma_cap=20.0)
    g = build_gaussian(spec, w)
    assert abs(g.norm_sq() - 1.0) < 1e-12


def test_gaussian_is_outer_product():
    w = LatticeWindow(-25, 25)
    spec = InitialStateSpec(StateKind.GAUSSIAN, center=(3, -4), sigma_cap=16.0)
    g = build_gaussian(spec, w)
    a = g.amp.real
    # rank-1 check: a == outer(u, v) built from a row/column through the peak
    i, j = 3 - w.n_min, -4 - w.n_min
    u = a[:, j] / math.sqrt(a[i, j])
    v = a[i, :] / math.sqrt(a[i, j])
    assert np.max(np.abs(a - np.outer(u, v))) < 1e-14
    assert np.max(np.abs(g.amp.imag)) == 0.0


def test_gaussian_margin_enforced():
    spec = InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=100.0)
    # sigma = 5, needs 17 sites of margin; 10 is not enough
    with pytest.raises(ConfigurationError, match="n_max"):
        build_gaussian(spec, LatticeWindow(-40, 10))
    with pytest.raises(ConfigurationError, match="n_min"):
        build_gaussian(spec, LatticeWindow(-10, 40))
    build_gaussian(spec, LatticeWindow(-17, 17))  # exactly at the limit


# ---------------------------------------------------------------- fock

def test_fock_single_site():
    w = LatticeWindow(-5, 5)
    g = build_fock(InitialStateSpec(StateKind.FOCK, center=(0, 2)), w)
    p = g.probabilities()
    assert p[5, 7] == 1.0
    assert g.norm_sq() == 1.0
    assert np.count_nonzero(p) == 1


def test_fock_margin():
    with pytest.raises(ConfigurationError):
        build_fock(InitialStateSpec(StateKind.FOCK, center=(4, 0)), LatticeWindow(-5, 5))
    build_fock(InitialStateSpec(StateKind.FOCK, center=(3, 0)), LatticeWindow(-5, 5))


def test_build_initial_state_dispatch():
    w = LatticeWindow(-10, 10)
    g = build_initial_state(InitialStateSpec(StateKind.FOCK, center=(0, 0)), w)
    assert g.amp[10, 10] == 1.0
    g = build_initial_state(InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=4.0), w)
    assert abs(g.norm_sq() - 1.0) < 1e-12


def test_builders_reject_wrong_kind():
    w = LatticeWindow(-10, 10)
    with pytest.raises(ConfigurationError):
        build_gaussian(InitialStateSpec(StateKind.FOCK, center=(0, 0)), w)
    with pytest.raises(ConfigurationError):
        build_fock(InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=4.0), w)


# ---------------------------------------------------------------- grid

def test_grid_padding_and_views():
    w = LatticeWindow(0, 4)
    g = AmplitudeGrid.zeros(w)
    assert g.padded.shape == (7, 7)
    assert g.amp.shape == (5, 5)
    g.amp[2, 3] = 1j
    assert g.padded[3, 4] == 1j  # interior view is offset by the halo
    assert g.norm_sq() == 1.0


def test_grid_border_max():
    w = LatticeWindow(0, 3)
    g = AmplitudeGrid.zeros(w)
    g.amp[1, 1] = 0.8
    g.amp[0, 2] = 0.3 + 0.4j  # on the border, |.| = 0.5
    assert math.isclose(g.border_max(), 0.5, rel_tol=1e-15)


def test_grid_from_amplitudes_validates_shape():
    w = LatticeWindow(0, 4)
    with pytest.raises(ConfigurationError):
        AmplitudeGrid.from_amplitudes(w, np.ones((4, 5)))


# ---------------------------------------------------------------- config

def _config(**kw):
    base = dict(
        window=LatticeWindow(-30, 30),
        u=3.0,
        drive=DriveParameters.resonant("doubled"),
        initial=InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=10.0),
        t_final=5.0,
    )
    base.update(kw)
    return SimulationConfig(**base)


def test_config_step_count():
    assert _config(t_final=5.0, dt=1e-3).n_steps == 5000
    assert _config(t_final=10.4719755, dt=1e-3).n_steps == 10471
    # guard against float-division undershoot: 0.3/0.1 -> exactly 3 steps
    assert _config(t_final=0.3, dt=0.1).n_steps == 3


def test_config_step_field_midpoint_vs_left():
    c = _config(dt=0.5)
    d = c.drive
    assert math.isclose(c.step_field(4), d.field_at(4 * 0.5 + 0.25), rel_tol=1e-15)
    c2 = c.with_(field_eval="left")
    assert math.isclose(c2.step_field(4), d.field_at(2.0), rel_tol=1e-15)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        _config(dt=0.0)
    with pytest.raises(ConfigurationError):
        _config(taylor_order=0)
    with pytest.raises(ConfigurationError):
        _config(t_final=-1.0)
    with pytest.raises(ConfigurationError):
        _config(sample_every=0)
    with pytest.raises(ConfigurationError):
        _config(field_eval="right")


def test_default_window_covers_reach_and_tail():
    spec = InitialStateSpec(StateKind.GAUSSIAN, center=(0, 0), sigma_cap=20.0)
    w = default_window(spec, t_final=10.0)
    # at least the ballistic reach (20 sites) plus the tail margin
    assert w.n_min <= -24 and w.n_max >= 24
    # a fock state needs less tail
    w2 = default_window(InitialStateSpec(StateKind.FOCK, center=(0, 0)), t_final=10.0)
    assert w2.size < w.size
