"""Timing comparison between the compiled stencil kernel and the numpy
fallback, including a cross-implementation agreement check."""

from __future__ import annotations

import time

import numpy as np

from .kernels import HAVE_COMPILED, get_kernel

__all__ = ["run_benchmark", "format_table"]


def _test_grid(n: int) -> np.ndarray:
    pad = np.zeros((n + 2, n + 2), dtype=np.complex128)
    x = np.arange(n) - n / 2.0
    env = np.exp(-(x ** 2) / (0.02 * n * n))
    pad[1:-1, 1:-1] = np.outer(env, env) * np.exp(0.3j * x)[None, :]
    pad[1:-1, 1:-1] /= np.sqrt(np.sum(np.abs(pad) ** 2))
    return pad


def _time_impl(kernel, pad, steps: int, order: int, dt: float) -> float:
    """Milliseconds per step, including one warmup step."""
    n_min = -(pad.shape[0] - 2) // 2
    term, hterm = np.zeros_like(pad), np.zeros_like(pad)
    kernel.taylor_step_2d(pad, term, hterm, n_min, 3.0, 1.08, dt, order)
    t0 = time.perf_counter()
    for step in range(steps):
        f = 0.6 + 0.48 * np.sin(1.2 * step * dt + 2.5)
        kernel.taylor_step_2d(pad, term, hterm, n_min, 3.0, f, dt, order)
    return (time.perf_counter() - t0) / steps * 1e3


def run_benchmark(sizes=(160, 240, 320), steps: int = 200, order: int = 12,
                  dt: float = 1e-3) -> list[dict]:
    """Time both kernels at each window size.

    Returns one row per size with ms/step for each implementation, the
    speedup, and the max amplitude deviation between the two after the
    timing loop (they see identical inputs).
    """
    rows = []
    py = get_kernel("python")
    comp = get_kernel("compiled") if HAVE_COMPILED else None
    for n in sizes:
        row = {"n": n, "ms_python": _time_impl(py, _test_grid(n), steps, order, dt)}
        if comp is not None:
            row["ms_compiled"] = _time_impl(comp, _test_grid(n), steps, order, dt)
            row["speedup"] = row["ms_python"] / row["ms_compiled"]
            pad_c, pad_p = _test_grid(n), _test_grid(n)
            tc, hc = np.zeros_like(pad_c), np.zeros_like(pad_c)
            tp, hp = np.zeros_like(pad_p), np.zeros_like(pad_p)
            for step in range(50):
                f = 0.6 + 0.48 * np.sin(1.2 * step * dt + 2.5)
                comp.taylor_step_2d(pad_c, tc, hc, -n // 2, 3.0, f, dt, order)
                py.taylor_step_2d(pad_p, tp, hp, -n // 2, 3.0, f, dt, order)
            row["max_dev"] = float(np.max(np.abs(pad_c - pad_p)))
        rows.append(row)
    return rows


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(no sizes requested)"
    have_comp = "ms_compiled" in rows[0]
    lines = []
    if have_comp:
        lines.append(f"{'n':>5}  {'compiled':>10}  {'python':>10}  {'speedup':>8}  {'max dev':>9}")
        for r in rows:
            lines.append(f"{r['n']:>5}  {r['ms_compiled']:>8.3f}ms  {r['ms_python']:>8.3f}ms"
                         f"  {r['speedup']:>7.1f}x  {r['max_dev']:>9.2e}")
    else:
        lines.append(f"{'n':>5}  {'python':>10}   (compiled extension not built)")
        for r in rows:
            lines.append(f"{r['n']:>5}  {r['ms_python']:>8.3f}ms")
    return "\n".join(lines)
