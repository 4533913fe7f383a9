"""Ready-made experiment specs for the standard production scenarios.

Each preset is a complete TOML document; `pairdrive presets NAME` prints
it, and the text can be saved and edited as a starting point. Horizons
follow the production defaults (40 doubled-resonance drive periods for
sweeps, 120 time units for time series); shorten t_final for quick
looks. Windows are auto-sized; set base.window to pin them.
"""

from __future__ import annotations

PRESETS: dict[str, str] = {}

PRESETS["drift-timeseries"] = """\
# Wavepacket centroid trajectories at both drive resonances.
# The extremal phase 2.5008 maximizes the net drift speed.
scenario = "time_series"
output_dir = "out/drift-timeseries"
phases = [2.5008]
omega_presets = ["fundamental", "doubled"]

[base]
u = 3.0
t_final = 120.0

[base.drive]
f0 = 0.6
f_omega = 0.48
phi = 2.5008

[base.initial]
kind = "gaussian"
center = [0, 0]
sigma_cap = 20.0
"""

PRESETS["phase-sweep"] = """\
# Drift velocity against the drive phase, both resonances, two packet
# widths; the CSV also carries the non-interacting semiclassical curve.
scenario = "phase_sweep"
output_dir = "out/phase-sweep"
sweep_values = [0.0, 0.19635, 0.3927, 0.58905, 0.7854, 0.98175, 1.1781,
                1.37445, 1.5708, 1.76715, 1.9635, 2.15985, 2.3562, 2.55255,
                2.7489, 2.94525, 3.1416, 3.33795, 3.5343, 3.73065, 3.927,
                4.12335, 4.3197, 4.51605, 4.7124, 4.90875, 5.1051, 5.30145,
                5.4978, 5.69415, 5.8905, 6.08685]
omega_presets = ["fundamental", "doubled"]
sigma_caps = [10.0, 20.0]
skip_periods = 1

[base]
u = 3.0
t_final = 210.0     # ~40 doubled-resonance periods

[base.drive]
f0 = 0.6
f_omega = 0.48

[base.initial]
kind = "gaussian"
center = [0, 0]
sigma_cap = 20.0
"""

PRESETS["u-sweep"] = """\
# Drift speed against the interaction strength at the extremal phase.
# The two resonances respond oppositely: an interior maximum at the
# doubled resonance, an interior minimum at the fundamental.
scenario = "u_sweep"
output_dir = "out/u-sweep"
sweep_values = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0]
omega_presets = ["fundamental", "doubled"]
skip_periods = 1

[base]
t_final = 210.0

[base.drive]
f0 = 0.6
f_omega = 0.48
phi = 2.5008

[base.initial]
kind = "gaussian"
center = [0, 0]
sigma_cap = 20.0
"""

PRESETS["density-snapshots"] = """\
# Two-particle probability maps |psi(n1,n2)|^2 at chosen times, one set
# per resonance. The manifest carries the near-diagonal mass
# (|n1-n2| <= 2), which separates bound-pair from independent motion.
scenario = "density_snapshots"
output_dir = "out/density-snapshots"
snapshot_times = [0.0, 30.0, 60.0]
omega_presets = ["fundamental", "doubled"]

[base]
u = 3.0
t_final = 60.0

[base.drive]
f0 = 0.6
f_omega = 0.48
phi = 1.5707963267948966    # pi/2: zero net drift, shape dynamics only

[base.initial]
kind = "gaussian"
center = [0, 0]
sigma_cap = 10.0
"""

PRESETS["entanglement-timeseries"] = """\
# Purity and pair covariance along time for several drive phases.
# At the doubled resonance purity decays steadily; at the fundamental
# resonance it saturates.
scenario = "time_series"
output_dir = "out/entanglement-timeseries"
phases = [1.5707963267948966, 2.0, 2.5]
omega_presets = ["fundamental", "doubled"]

[base]
u = 3.0
t_final = 120.0

[base.drive]
f0 = 0.6
f_omega = 0.48

[base.initial]
kind = "gaussian"
center = [0, 0]
sigma_cap = 20.0
"""

PRESETS["fock-comparison"] = """\
# Entanglement growth from single-site pairs: same-site (d = 0) versus
# well-separated (d = 10) initial occupation under the doubled resonance.
scenario = "fock_entanglement"
output_dir = "out/fock-comparison"
fock_separations = [0, 10]
omega_presets = ["doubled"]

[base]
u = 3.0
t_final = 120.0

[base.drive]
f0 = 0.6
f_omega = 0.48
phi = 2.5

[base.initial]
kind = "fock"
center = [0, 0]
"""


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> str:
    """TOML text of a named preset; KeyError lists the valid names."""
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}") from None
