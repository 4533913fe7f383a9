"""Batch layer: experiment specs, the five scenario runners, and file emission.

A spec file (TOML) selects a scenario and a base configuration; the
runner expands it into independent simulations, executes them through a
thread pool (the compiled kernel releases the GIL), and emits CSV files
plus a JSON manifest with content hashes. Everything is deterministic:
identical specs produce byte-identical CSVs regardless of thread count.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import evolve
from .model import (
    ConfigurationError,
    DriveParameters,
    InitialStateSpec,
    LatticeWindow,
    SimulationConfig,
    StateKind,
    default_window,
    gaussian_margin,
)
from .observables import (
    ObservableSeries,
    SeriesRecorder,
    drift_velocity,
    semiclassical_velocity,
)

__all__ = [
    "Scenario",
    "ExperimentSpec",
    "RunManifest",
    "load_spec",
    "loads_spec",
    "resolve_drive",
    "driven_window",
    "run_experiment",
    "run_validation",
    "CheckResult",
]

OMEGA_PRESETS = ("fundamental", "doubled")


class Scenario(enum.Enum):
    TIME_SERIES = "time_series"
    PHASE_SWEEP = "phase_sweep"
    U_SWEEP = "u_sweep"
    DENSITY_SNAPSHOTS = "density_snapshots"
    FOCK_ENTANGLEMENT = "fock_entanglement"
    VALIDATE = "validate"


@dataclass(frozen=True)
class ExperimentSpec:
    """One batch of runs: a scenario plus the axes it fans out over.

    Axes that a scenario does not use are ignored. Sweep scenarios read
    sweep_values (phases or interaction strengths); time-series
    scenarios fan out over phases x omega_presets; the entanglement
    comparison over fock_separations.
    """

    scenario: Scenario
    base: SimulationConfig
    output_dir: Path = Path("out")
    sweep_values: tuple[float, ...] = ()
    snapshot_times: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()
    omega_presets: tuple[str, ...] = ("doubled",)
    sigma_caps: tuple[float, ...] = ()
    fock_separations: tuple[int, ...] = ()
    skip_periods: int = 1
    auto_window: bool = True   # size the window per run instead of base.window

    def __post_init__(self):
        for preset in self.omega_presets:
            if preset not in OMEGA_PRESETS:
                raise ConfigurationError(
                    f"unknown omega preset {preset!r}; allowed: {OMEGA_PRESETS}")
        if not self.omega_presets:
            raise ConfigurationError("omega_presets must not be empty")
        sc = self.scenario
        if sc in (Scenario.PHASE_SWEEP, Scenario.U_SWEEP) and not self.sweep_values:
            raise ConfigurationError(f"{sc.value} requires non-empty sweep_values")
        if sc is Scenario.DENSITY_SNAPSHOTS:
            if not self.snapshot_times:
                raise ConfigurationError("density_snapshots requires snapshot_times")
            for t in self.snapshot_times:
                if not 0.0 <= t <= self.base.t_final:
                    raise ConfigurationError(
                        f"snapshot time {t:g} outside [0, t_final={self.base.t_final:g}]")
        if sc is Scenario.FOCK_ENTANGLEMENT and not self.fock_separations:
            raise ConfigurationError("fock_entanglement requires fock_separations")
        if self.skip_periods < 0:
            raise ConfigurationError("skip_periods must be >= 0")


@dataclass
class RunManifest:
    """What a batch produced: config echo, per-run health, file hashes."""

    scenario: str
    code_version: str
    config: dict
    started_utc: str
    finished_utc: str
    runs: list[dict] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "scenario": self.scenario,
            "code_version": self.code_version,
            "config": self.config,
            "started_utc": self.started_utc,
            "finished_utc": self.finished_utc,
            "runs": self.runs,
            "files": self.files,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


# ------------------------------------------------------------ spec loading

_DEF_F0 = 0.6


def resolve_drive(base: DriveParameters, preset: str) -> DriveParameters:
    """Drive with omega locked to the preset's resonance of the DC field."""
    if preset == "fundamental":
        omega = base.f0
    elif preset == "doubled":
        omega = 2.0 * base.f0
    else:
        raise ConfigurationError(f"unknown omega preset {preset!r}; allowed: {OMEGA_PRESETS}")
    return DriveParameters(base.f0, base.f_omega, omega, base.phi)


def driven_window(initial: InitialStateSpec, drive: DriveParameters,
                  t_final: float, border_threshold: float) -> LatticeWindow:
    """Window sized for a driven run: oscillation extent, worst-case drift
    in either direction, and the tail margin of the initial state.

    Without a DC field there is no localization and the free-spreading
    bound applies instead.
    """
    if drive.f0 <= 0.0:
        return default_window(initial, t_final, border_threshold)
    if initial.kind is StateKind.GAUSSIAN:
        margin = gaussian_margin(initial.sigma_cap, border_threshold)
    else:
        # the force couples only to the pair's center of mass, so an
        # interacting pair leaks a static evanescent tail in the
        # field-free relative coordinate a few sites past the
        # single-particle localization estimate
        margin = 13
    reach = math.ceil(4.0 / drive.f0) + margin + 4
    if drive.f_omega != 0.0:
        # resonant driving delocalizes: allow for the renormalized-band
        # drift plus the moving tail front (empirically < 1.25 sites/time)
        reach += math.ceil(1.25 * t_final)
    lo = min(initial.center) - reach
    hi = max(initial.center) + reach
    return LatticeWindow(lo, hi)


_TOP_KEYS = frozenset({
    "scenario", "output_dir", "base", "sweep_values", "snapshot_times",
    "phases", "omega_presets", "sigma_caps", "fock_separations", "skip_periods",
})
_BASE_KEYS = frozenset({
    "window", "u", "drive", "initial", "t_final", "dt", "taylor_order",
    "sample_every", "border_threshold", "norm_tolerance", "field_eval",
})
_DRIVE_KEYS = frozenset({"f0", "f_omega", "omega", "phi"})
_INITIAL_KEYS = frozenset({"kind", "center", "sigma_cap"})


def _reject_unknown(table: dict, allowed: frozenset, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if not unknown:
        return
    hints = []
    for key in unknown:
        if where == "top level" and key in _BASE_KEYS:
            hints.append(f"{key!r} belongs in the [base] table")
        elif where == "[base]" and key in _TOP_KEYS:
            hints.append(f"{key!r} belongs at the top level")
    hint = f" ({'; '.join(hints)})" if hints else ""
    raise ConfigurationError(
        f"unknown key(s) at {where}: {', '.join(map(repr, unknown))}{hint}; "
        f"allowed: {', '.join(sorted(allowed))}")


def _parse_drive(table: dict) -> DriveParameters:
    _reject_unknown(table, _DRIVE_KEYS, "[base.drive]")
    f0 = float(table.get("f0", _DEF_F0))
    f_omega = float(table.get("f_omega", 0.8 * f0))
    phi = float(table.get("phi", 0.0))
    omega = float(table.get("omega", 2.0 * f0))
    return DriveParameters(f0=f0, f_omega=f_omega, omega=omega, phi=phi)


def _parse_initial(table: dict) -> InitialStateSpec:
    _reject_unknown(table, _INITIAL_KEYS, "[base.initial]")
    kind_name = str(table.get("kind", "gaussian")).lower()
    try:
        kind = StateKind(kind_name)
    except ValueError:
        raise ConfigurationError(
            f"initial.kind must be one of {[k.value for k in StateKind]}, got {kind_name!r}") from None
    center = table.get("center", (0, 0))
    if len(center) != 2:
        raise ConfigurationError("initial.center must be a pair of site indices")
    center = (int(center[0]), int(center[1]))
    sigma_cap = float(table.get("sigma_cap", 20.0 if kind is StateKind.GAUSSIAN else 0.0))
    return InitialStateSpec(kind=kind, center=center, sigma_cap=sigma_cap)


def loads_spec(text: str) -> ExperimentSpec:
    """Parse a TOML experiment spec from a string. See load_spec."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigurationError(f"spec parse error: {err}") from None
    return _build_spec(doc)


def load_spec(path: str | Path) -> ExperimentSpec:
    """Load and validate a TOML experiment spec, applying the standard
    defaults (dt=1e-3, order 12, f0=0.6, f_omega=0.8*f0)."""
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"spec file not found: {path}") from None
    except tomllib.TOMLDecodeError as err:
        raise ConfigurationError(f"{path}: parse error: {err}") from None
    return _build_spec(doc)


def _build_spec(doc: dict) -> ExperimentSpec:
    if "scenario" not in doc:
        allowed = ", ".join(s.value for s in Scenario)
        raise ConfigurationError(f"spec must name a scenario; allowed: {allowed}")
    raw = str(doc["scenario"]).strip()
    name = raw.replace("-", "_").lower()
    try:
        scenario = Scenario(name)
    except ValueError:
        allowed = ", ".join(s.value for s in Scenario)
        raise ConfigurationError(f"unknown scenario {raw!r}; allowed: {allowed}") from None

    _reject_unknown(doc, _TOP_KEYS, "top level")
    base_table = dict(doc.get("base", {}))
    _reject_unknown(base_table, _BASE_KEYS, "[base]")
    drive = _parse_drive(dict(base_table.get("drive", {})))
    initial = _parse_initial(dict(base_table.get("initial", {})))
    t_final = float(base_table.get("t_final", 120.0))
    border_threshold = float(base_table.get("border_threshold", 1e-10))

    window_spec = base_table.get("window")
    auto_window = window_spec is None
    if auto_window:
        window = driven_window(initial, drive, t_final, border_threshold)
    else:
        if len(window_spec) != 2:
            raise ConfigurationError("base.window must be [n_min, n_max]")
        window = LatticeWindow(int(window_spec[0]), int(window_spec[1]))

    try:
        base = SimulationConfig(
            window=window,
            u=float(base_table.get("u", 0.0)),
            drive=drive,
            initial=initial,
            t_final=t_final,
            dt=float(base_table.get("dt", 1e-3)),
            taylor_order=int(base_table.get("taylor_order", 12)),
            sample_every=int(base_table.get("sample_every", 100)),
            border_threshold=border_threshold,
            norm_tolerance=float(base_table.get("norm_tolerance", 1e-8)),
            field_eval=str(base_table.get("field_eval", "midpoint")),
        )
    except (TypeError, ValueError) as err:
        raise ConfigurationError(f"invalid base configuration: {err}") from None

    phases = tuple(float(p) for p in doc.get("phases", (drive.phi,)))
    return ExperimentSpec(
        scenario=scenario,
        base=base,
        output_dir=Path(doc.get("output_dir", "out")),
        sweep_values=tuple(float(v) for v in doc.get("sweep_values", ())),
        snapshot_times=tuple(float(t) for t in doc.get("snapshot_times", ())),
        phases=phases,
        omega_presets=tuple(str(p) for p in doc.get("omega_presets", ("doubled",))),
        sigma_caps=tuple(float(s) for s in doc.get("sigma_caps", ())),
        fock_separations=tuple(int(d) for d in doc.get("fock_separations", ())),
        skip_periods=int(doc.get("skip_periods", 1)),
        auto_window=auto_window,
    )


def spec_as_dict(spec: ExperimentSpec) -> dict:
    """Manifest echo of the fully resolved spec."""
    b = spec.base
    return {
        "scenario": spec.scenario.value,
        "output_dir": str(spec.output_dir),
        "base": {
            "window": [b.window.n_min, b.window.n_max],
            "auto_window": spec.auto_window,
            "u": b.u,
            "drive": {"f0": b.drive.f0, "f_omega": b.drive.f_omega,
                      "omega": b.drive.omega, "phi": b.drive.phi},
            "initial": {"kind": b.initial.kind.value,
                        "center": list(b.initial.center),
                        "sigma_cap": b.initial.sigma_cap},
            "t_final": b.t_final,
            "dt": b.dt,
            "taylor_order": b.taylor_order,
            "sample_every": b.sample_every,
            "border_threshold": b.border_threshold,
            "norm_tolerance": b.norm_tolerance,
            "field_eval": b.field_eval,
        },
        "sweep_values": list(spec.sweep_values),
        "snapshot_times": list(spec.snapshot_times),
        "phases": list(spec.phases),
        "omega_presets": list(spec.omega_presets),
        "sigma_caps": list(spec.sigma_caps),
        "fock_separations": list(spec.fock_separations),
        "skip_periods": spec.skip_periods,
    }


# ------------------------------------------------------------- file output

def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    """Fixed column order, 17-significant-digit floats, LF line endings."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def sha256_file(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _series_rows(series: ObservableSeries):
    cols = [series.column(name) for name in ObservableSeries.COLUMNS]
    for i in range(len(series)):
        yield tuple(float(c[i]) for c in cols)


def _series_health(series: ObservableSeries) -> dict:
    return {
        "norm_max_drift": float(np.max(np.abs(series.norm - 1.0))),
        "border_max": float(np.max(series.border_max)),
    }


# ----------------------------------------------------------- run expansion

def _config_for(spec: ExperimentSpec, *, preset: str, phi: float | None = None,
                u: float | None = None, sigma_cap: float | None = None,
                initial: InitialStateSpec | None = None) -> SimulationConfig:
    """Base config specialized to one run of a scenario."""
    b = spec.base
    drive = resolve_drive(b.drive, preset)
    if phi is not None:
        drive = DriveParameters(drive.f0, drive.f_omega, drive.omega, phi)
    if initial is None:
        initial = b.initial
    if sigma_cap is not None:
        initial = InitialStateSpec(StateKind.GAUSSIAN, initial.center, sigma_cap)
    window = (driven_window(initial, drive, b.t_final, b.border_threshold)
              if spec.auto_window else b.window)
    return b.with_(window=window, drive=drive, initial=initial,
                   u=b.u if u is None else u)


def _pool_run(jobs, threads: int):
    """Execute callables preserving order; exceptions propagate."""
    if threads <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def _fock_center(d0: int) -> tuple[int, int]:
    # split the separation symmetrically so the pair is centered near 0
    return (-(d0 // 2), d0 - d0 // 2)


# -------------------------------------------------------------- scenarios

def _emit_series_files(labeled_runs, threads: int, impl: str, out: Path,
                       manifest: RunManifest):
    """Common path for time-series style scenarios.

    labeled_runs: sequence of (label, SimulationConfig, extras-dict).
    """
    def make_job(cfg):
        def job():
            rec = SeriesRecorder()
            evolve(cfg, impl=impl, hooks=[rec])
            return rec.series()
        return job

    results = _pool_run([make_job(cfg) for _, cfg, _ in labeled_runs], threads)
    written: list[Path] = []
    try:
        for (label, cfg, extras), series in zip(labeled_runs, results):
            path = out / f"{label}.csv"
            write_csv(path, ObservableSeries.COLUMNS, _series_rows(series))
            written.append(path)
            entry = {"label": label, **extras, **_series_health(series),
                     "window": [cfg.window.n_min, cfg.window.n_max]}
            manifest.runs.append(entry)
            manifest.files[path.name] = sha256_file(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def _run_time_series(spec: ExperimentSpec, threads: int, impl: str,
                     out: Path, manifest: RunManifest):
    runs = []
    for preset in spec.omega_presets:
        for phi in spec.phases:
            cfg = _config_for(spec, preset=preset, phi=phi)
            runs.append((f"series_{preset}_phi{phi:.4f}", cfg,
                         {"omega_preset": preset, "phi": phi, "u": cfg.u}))
    _check_unique_labels(runs)
    _emit_series_files(runs, threads, impl, out, manifest)


def _run_fock_entanglement(spec: ExperimentSpec, threads: int, impl: str,
                           out: Path, manifest: RunManifest):
    runs = []
    for preset in spec.omega_presets:
        for d0 in spec.fock_separations:
            initial = InitialStateSpec(StateKind.FOCK, _fock_center(d0))
            cfg = _config_for(spec, preset=preset, initial=initial)
            runs.append((f"fock_{preset}_d{d0}", cfg,
                         {"omega_preset": preset, "separation": d0, "u": cfg.u}))
    _check_unique_labels(runs)
    _emit_series_files(runs, threads, impl, out, manifest)


def _sweep_velocity(cfg: SimulationConfig, impl: str, skip_periods: int):
    rec = SeriesRecorder(with_purity=False)
    evolve(cfg, impl=impl, hooks=[rec])
    series = rec.series()
    return drift_velocity(series, cfg.drive, skip_periods), _series_health(series)


def _run_phase_sweep(spec: ExperimentSpec, threads: int, impl: str,
                     out: Path, manifest: RunManifest):
    sigma_caps = spec.sigma_caps or (spec.base.initial.sigma_cap,)
    groups = []   # (filename, ratio, [(phi, cfg), ...])
    for preset in spec.omega_presets:
        for sc in sigma_caps:
            cfgs = [(phi, _config_for(spec, preset=preset, phi=phi, sigma_cap=sc))
                    for phi in spec.sweep_values]
            groups.append((f"phase_sweep_{preset}_sigma{sc:g}", cfgs))

    jobs = [(lambda c=cfg: _sweep_velocity(c, impl, spec.skip_periods))
            for _, cfgs in groups for _, cfg in cfgs]
    results = iter(_pool_run(jobs, threads))

    written: list[Path] = []
    try:
        for label, cfgs in groups:
            rows = []
            for phi, cfg in cfgs:
                v, health = next(results)
                ratio = cfg.drive.f_omega / cfg.drive.f0
                rows.append((float(phi), float(v),
                             float(semiclassical_velocity(ratio, phi))))
                manifest.runs.append({"label": label, "phi": phi,
                                      "drift_velocity": v, **health,
                                      "window": [cfg.window.n_min, cfg.window.n_max]})
            path = out / f"{label}.csv"
            write_csv(path, ("phi", "drift_velocity", "semiclassical_prediction"), rows)
            written.append(path)
            manifest.files[path.name] = sha256_file(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def _run_u_sweep(spec: ExperimentSpec, threads: int, impl: str,
                 out: Path, manifest: RunManifest):
    groups = []
    for preset in spec.omega_presets:
        cfgs = [(u, _config_for(spec, preset=preset, u=u)) for u in spec.sweep_values]
        groups.append((f"u_sweep_{preset}", cfgs))

    jobs = [(lambda c=cfg: _sweep_velocity(c, impl, spec.skip_periods))
            for _, cfgs in groups for _, cfg in cfgs]
    results = iter(_pool_run(jobs, threads))

    written: list[Path] = []
    try:
        for label, cfgs in groups:
            rows = []
            for u, cfg in cfgs:
                v, health = next(results)
                rows.append((float(u), abs(float(v))))
                manifest.runs.append({"label": label, "u": u, "drift_velocity": v,
                                      **health,
                                      "window": [cfg.window.n_min, cfg.window.n_max]})
            path = out / f"{label}.csv"
            write_csv(path, ("u", "max_drift_velocity"), rows)
            written.append(path)
            manifest.files[path.name] = sha256_file(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


class _SnapshotCollector:
    """Hook that keeps probability grids at the sample times nearest to
    the requested snapshot times."""

    def __init__(self, cfg: SimulationConfig, requested):
        step_dt = cfg.dt * cfg.sample_every
        n_samples = cfg.n_steps // cfg.sample_every
        self.targets = sorted({min(round(t / step_dt), n_samples) * step_dt
                               for t in requested})
        self.kept: list[tuple[float, np.ndarray]] = []

    def __call__(self, t: float, grid):
        if self.targets and abs(t - self.targets[0]) < 1e-9:
            self.targets.pop(0)
            self.kept.append((t, grid.probabilities()))


def _diagonal_mass(p: np.ndarray, width: int = 2) -> float:
    n = p.shape[0]
    idx = np.arange(n)
    mask = np.abs(idx[:, None] - idx[None, :]) <= width
    return float(p[mask].sum())


def _run_density_snapshots(spec: ExperimentSpec, threads: int, impl: str,
                           out: Path, manifest: RunManifest):
    runs = []
    for preset in spec.omega_presets:
        cfg = _config_for(spec, preset=preset)
        runs.append((preset, cfg))

    def make_job(cfg):
        def job():
            col = _SnapshotCollector(cfg, spec.snapshot_times)
            rec = SeriesRecorder(with_purity=False)
            evolve(cfg, impl=impl, hooks=[col, rec])
            return col.kept, rec.series()
        return job

    results = _pool_run([make_job(cfg) for _, cfg in runs], threads)
    written: list[Path] = []
    try:
        for (preset, cfg), (kept, series) in zip(runs, results):
            sites = cfg.window.sites()
            masses = {}
            for t, p in kept:
                path = out / f"density_{preset}_t{t:g}.csv"
                rows = ((int(n1), int(n2), float(p[i, j]))
                        for i, n1 in enumerate(sites)
                        for j, n2 in enumerate(sites))
                write_csv(path, ("n1", "n2", "probability"), rows)
                written.append(path)
                manifest.files[path.name] = sha256_file(path)
                masses[f"{t:g}"] = _diagonal_mass(p)
            manifest.runs.append({"label": f"density_{preset}",
                                  "omega_preset": preset, "u": cfg.u,
                                  "diagonal_mass": masses,
                                  **_series_health(series),
                                  "window": [cfg.window.n_min, cfg.window.n_max]})
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def _check_unique_labels(runs):
    labels = [label for label, *_ in runs]
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise ConfigurationError(f"run labels collide after formatting: {dupes}")


# ------------------------------------------------------------- validation

@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance


def run_validation(impl: str = "auto", *, t_final: float = 5.0,
                   phis: tuple[float, ...] = (0.0, math.pi / 2, 2.5)) -> list[CheckResult]:
    """Cross-implementation checks: dense exponential vs. Taylor stepper
    over the standard parameter matrix, literal vs. fast purity, and the
    non-interacting separability reference."""
    from .observables import state_purity
    from .oracle import dense_evolve, literal_purity, separability_reference
    from .model import AmplitudeGrid

    results = []
    window = LatticeWindow(-4, 4)
    initial = InitialStateSpec(StateKind.FOCK, (0, 0))
    for u in (0.0, 3.0, 10.0):
        for preset in OMEGA_PRESETS:
            for phi in phis:
                omega = 0.6 if preset == "fundamental" else 1.2
                drive = DriveParameters(f0=0.6, f_omega=0.48, omega=omega, phi=phi)
                cfg = SimulationConfig(
                    window=window, u=u, drive=drive, initial=initial,
                    t_final=t_final, border_threshold=2.0)
                dev = float(np.max(np.abs(
                    dense_evolve(cfg).amp - evolve(cfg, impl=impl).grid.amp)))
                results.append(CheckResult(
                    f"dense vs taylor: u={u:g} {preset} phi={phi:.4g}", dev, 1e-8))

    rng = np.random.default_rng(1234)
    w12 = LatticeWindow(-6, 5)
    worst = 0.0
    for _ in range(50):
        a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        g = AmplitudeGrid.from_amplitudes(w12, a / np.linalg.norm(a))
        worst = max(worst, abs(state_purity(g) - literal_purity(g)))
    results.append(CheckResult("purity: matrix product vs literal sum (50 states)",
                               worst, 1e-12))

    cfg = SimulationConfig(
        window=LatticeWindow(-24, 24), u=0.0,
        drive=DriveParameters(f0=0.6, f_omega=0.48, omega=1.2, phi=2.5),
        initial=InitialStateSpec(StateKind.GAUSSIAN, (0, 0), 10.0),
        t_final=2.0)
    dev = float(np.max(np.abs(separability_reference(cfg, impl=impl).amp
                              - evolve(cfg, impl=impl).grid.amp)))
    results.append(CheckResult("u=0 separability: 1d product vs 2d evolution",
                               dev, 1e-8))
    return results


# -------------------------------------------------------------- dispatcher

_SCENARIO_RUNNERS = {
    Scenario.TIME_SERIES: _run_time_series,
    Scenario.PHASE_SWEEP: _run_phase_sweep,
    Scenario.U_SWEEP: _run_u_sweep,
    Scenario.DENSITY_SNAPSHOTS: _run_density_snapshots,
    Scenario.FOCK_ENTANGLEMENT: _run_fock_entanglement,
}


def run_experiment(spec: ExperimentSpec, *, threads: int = 1,
                   impl: str = "auto", out_dir: Path | None = None) -> RunManifest:
    """Execute a scenario and emit its files plus `manifest.json`.

    Returns the manifest. On failure every partially written output of
    this invocation is removed.
    """
    if spec.scenario is Scenario.VALIDATE:
        raise ConfigurationError(
            "the validate scenario produces a report, not files; use run_validation()")
    out = Path(out_dir) if out_dir is not None else spec.output_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        scenario=spec.scenario.value,
        code_version=__version__,
        config=spec_as_dict(spec),
        started_utc=datetime.now(timezone.utc).isoformat(),
        finished_utc="",
    )
    _SCENARIO_RUNNERS[spec.scenario](spec, threads, impl, out, manifest)
    manifest.finished_utc = datetime.now(timezone.utc).isoformat()
    (out / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest
