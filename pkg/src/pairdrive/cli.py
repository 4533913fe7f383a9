"""Command-line entry point: run, validate, presets, bench."""

from __future__ import annotations

import os

# Pin BLAS pools before numpy loads: the reduced-density products must
# sum in a fixed order for byte-identical reruns.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import sys
from pathlib import Path

from .dynamics import SimulationError
from .model import ConfigurationError


def _cmd_run(args) -> int:
    from dataclasses import replace

    from .runner import load_spec, run_experiment

    spec = load_spec(args.spec)
    if args.field_eval is not None:
        spec = replace(spec, base=spec.base.with_(field_eval=args.field_eval))
    manifest = run_experiment(spec, threads=args.threads, impl=args.impl,
                              out_dir=args.out)
    out = args.out if args.out is not None else spec.output_dir
    for entry in manifest.runs:
        print(f"  {entry['label']}: norm drift {entry['norm_max_drift']:.2e}, "
              f"border {entry['border_max']:.2e}")
    print(f"wrote {len(manifest.files)} files + manifest.json to {out}")
    return 0


def _cmd_validate(args) -> int:
    from .runner import run_validation

    t_final = 0.5 if args.quick else 5.0
    results = run_validation(impl=args.impl, t_final=t_final)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  max dev {r.deviation:.3e}  tol {r.tolerance:g}  {status}")
        failures += 0 if r.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def _cmd_presets(args) -> int:
    from .presets import get_preset, preset_names

    if args.name is None:
        print("available presets (print one with `pairdrive presets NAME`):")
        for name in preset_names():
            first_comment = get_preset(name).splitlines()[0].lstrip("# ")
            print(f"  {name:<24} {first_comment}")
        return 0
    try:
        print(get_preset(args.name), end="")
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return 1
    return 0


def _cmd_bench(args) -> int:
    from .benchmark import format_table, run_benchmark

    rows = run_benchmark(sizes=tuple(args.sizes), steps=args.steps)
    print(format_table(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairdrive",
        description="Driven two-particle lattice dynamics: simulations, "
                    "sweeps, and cross-implementation validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a TOML experiment spec")
    p.add_argument("spec", type=Path, help="spec file (see `pairdrive presets`)")
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (default: spec's output_dir)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for independent runs (default 1)")
    p.add_argument("--field-eval", choices=("left", "midpoint"), default=None,
                   help="override the per-step field evaluation point")
    p.add_argument("--impl", choices=("auto", "compiled", "python"), default="auto",
                   help="kernel implementation (default auto)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("validate",
                       help="cross-check the fast stepper against dense references")
    p.add_argument("--impl", choices=("auto", "compiled", "python"), default="auto")
    p.add_argument("--quick", action="store_true",
                   help="short horizon (smoke test rather than full check)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("presets", help="print ready-made experiment specs")
    p.add_argument("name", nargs="?", help="preset name (omit to list)")
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("bench", help="time the compiled kernel against the numpy fallback")
    p.add_argument("--sizes", type=int, nargs="+", default=[160, 240, 320],
                   help="window sizes to time")
    p.add_argument("--steps", type=int, default=200, help="steps per timing loop")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, SimulationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
