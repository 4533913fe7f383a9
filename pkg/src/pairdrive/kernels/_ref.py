"""Pure-numpy propagation kernels (reference implementation).

Grid convention shared with the compiled extension: state arrays are
C-contiguous complex128, padded by one cell per side, and the halo is
exactly zero. The stencil reads the halo (contributing the implicit
zero amplitude outside the window) and never writes it, so the padding
invariant survives every call. `n_min` is the site index of the first
interior cell.
"""

import numpy as np

IMPL = "python"


def _site_factors(w, n_min, f):
    # padded index m holds site n_min + m - 1
    return f * (n_min - 1 + np.arange(w, dtype=np.float64))


def apply_h_2d(out, psi, n_min, u, f):
    """out <- H psi: four-neighbour hopping + [f*(n1+n2) + same-site u] diagonal."""
    n = psi.shape[0] - 2
    fs = _site_factors(psi.shape[0], n_min, f)
    diag = fs[1:-1, None] + fs[None, 1:-1]
    inner = psi[1:-1, 1:-1]
    target = out[1:-1, 1:-1]
    np.multiply(diag, inner, out=target)
    idx = np.arange(n)
    target[idx, idx] += u * inner[idx, idx]
    target += psi[:-2, 1:-1]
    target += psi[2:, 1:-1]
    target += psi[1:-1, :-2]
    target += psi[1:-1, 2:]


def taylor_step_2d(psi, term, hterm, n_min, u, f, dt, order):
    """Advance psi by one truncated-Taylor step of exp(-i*H*dt), in place.

    Uses the forward recurrence term_{l} = (-i*dt/l) * H term_{l-1} with a
    running sum into psi. term and hterm are scratch grids; contents are
    unspecified afterwards (halos stay zero).
    """
    np.copyto(term, psi)
    for l in range(1, order + 1):
        apply_h_2d(hterm, term, n_min, u, f)
        hterm *= -1j * (dt / l)
        psi += hterm
        term, hterm = hterm, term


def apply_h_1d(out, psi, n_min, f):
    """out <- H1 psi: two-neighbour hopping + f*n diagonal."""
    fs = _site_factors(psi.shape[0], n_min, f)
    np.multiply(fs[1:-1], psi[1:-1], out=out[1:-1])
    out[1:-1] += psi[:-2]
    out[1:-1] += psi[2:]


def taylor_step_1d(psi, term, hterm, n_min, f, dt, order):
    """One-particle analogue of taylor_step_2d."""
    np.copyto(term, psi)
    for l in range(1, order + 1):
        apply_h_1d(hterm, term, n_min, f)
        hterm *= -1j * (dt / l)
        psi += hterm
        term, hterm = hterm, term
