"""Propagation kernels: compiled extension when built, numpy fallback otherwise.

The two implementations expose the same four functions
(`taylor_step_2d`, `apply_h_2d`, `taylor_step_1d`, `apply_h_1d`) on the
same padded-grid convention and agree to rounding; `pairdrive bench`
compares their speed. Selection happens once at import, or explicitly
through :func:`get_kernel`.
"""

from . import _ref

try:
    from . import _core
except ImportError:  # extension not built; numpy path takes over
    _core = None

HAVE_COMPILED = _core is not None
DEFAULT_IMPL = "compiled" if HAVE_COMPILED else "python"

_IMPLS = {"python": _ref}
if HAVE_COMPILED:
    _IMPLS["compiled"] = _core


def get_kernel(impl="auto"):
    """Return the kernel module for `impl` ("auto", "compiled" or "python")."""
    if impl == "auto":
        impl = DEFAULT_IMPL
    try:
        return _IMPLS[impl]
    except KeyError:
        if impl == "compiled":
            raise RuntimeError("compiled kernel requested but the extension is not built") from None
        raise ValueError(f"unknown kernel implementation {impl!r}") from None
