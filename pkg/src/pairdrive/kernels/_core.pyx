# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernels.

Same contract as the numpy reference in `_ref`: grids are C-contiguous
complex128 arrays padded by one zero cell per side, the stencil reads the
halo but never writes it, and `n_min` is the site index of the first
interior cell. Complex values are manipulated through an interleaved
(re, im) double view so the inner loops stay branch-free and vectorizable.
"""

import numpy as np

from libc.string cimport memcpy

IMPL = "compiled"


cdef inline void _stencil_axpy_2d(double* ps, double* tr, double* tw,
                                  const double* fsite, double u, double x,
                                  Py_ssize_t n, Py_ssize_t w) noexcept nogil:
    # tw <- (-i*x) * (H tr) and ps += tw, with x = dt/l.
    # Multiplying by -i*x maps (re, im) -> (x*im, -x*re).
    cdef Py_ssize_t i, j, k, k2, ww = 2 * w
    cdef double fi, dg, hre, him, nre, nim
    for i in range(1, n + 1):
        fi = fsite[i]
        k = i * w + 1
        for j in range(1, n + 1):
            k2 = 2 * k
            dg = fi + fsite[j]
            hre = tr[k2 - ww] + tr[k2 + ww] + tr[k2 - 2] + tr[k2 + 2] + dg * tr[k2]
            him = tr[k2 - ww + 1] + tr[k2 + ww + 1] + tr[k2 - 1] + tr[k2 + 3] + dg * tr[k2 + 1]
            nre = x * him
            nim = -x * hre
            tw[k2] = nre
            tw[k2 + 1] = nim
            ps[k2] += nre
            ps[k2 + 1] += nim
            k += 1
        # On-site interaction: the coordinates share one site axis, so the
        # same-site cell of row i is column i. Folding it in here keeps the
        # j loop branch-free.
        k2 = 2 * (i * w + i)
        nre = x * u * tr[k2 + 1]
        nim = -x * u * tr[k2]
        tw[k2] += nre
        tw[k2 + 1] += nim
        ps[k2] += nre
        ps[k2 + 1] += nim


def taylor_step_2d(double complex[:, ::1] psi, double complex[:, ::1] term,
                   double complex[:, ::1] hterm, long n_min, double u,
                   double f, double dt, int order):
    """Advance psi by one truncated-Taylor step of exp(-i*H*dt), in place.

    term and hterm are scratch grids of the same padded shape; their
    contents are unspecified afterwards (their halos stay zero).
    """
    cdef Py_ssize_t w = psi.shape[0]
    cdef Py_ssize_t n = w - 2
    cdef double* ps = <double*> &psi[0, 0]
    cdef double* tr = <double*> &term[0, 0]
    cdef double* tw = <double*> &hterm[0, 0]
    cdef double* tmp
    cdef int l
    cdef Py_ssize_t m
    fsite_arr = np.empty(w, dtype=np.float64)
    cdef double[::1] fsite = fsite_arr
    for m in range(w):
        fsite[m] = f * (n_min + m - 1)
    with nogil:
        memcpy(tr, ps, 16 * w * w)
        for l in range(1, order + 1):
            _stencil_axpy_2d(ps, tr, tw, &fsite[0], u, dt / l, n, w)
            tmp = tr
            tr = tw
            tw = tmp


def apply_h_2d(double complex[:, ::1] out, double complex[:, ::1] psi,
               long n_min, double u, double f):
    """out <- H psi on padded grids (hopping + f*(n1+n2) + same-site u)."""
    cdef Py_ssize_t w = psi.shape[0]
    cdef Py_ssize_t n = w - 2
    cdef double* po = <double*> &out[0, 0]
    cdef double* pp = <double*> &psi[0, 0]
    cdef Py_ssize_t i, j, k, k2, m, ww = 2 * w
    cdef double fi, dg
    fsite_arr = np.empty(w, dtype=np.float64)
    cdef double[::1] fsite = fsite_arr
    for m in range(w):
        fsite[m] = f * (n_min + m - 1)
    with nogil:
        for i in range(1, n + 1):
            fi = fsite[i]
            k = i * w + 1
            for j in range(1, n + 1):
                k2 = 2 * k
                dg = fi + fsite[j]
                po[k2] = pp[k2 - ww] + pp[k2 + ww] + pp[k2 - 2] + pp[k2 + 2] + dg * pp[k2]
                po[k2 + 1] = pp[k2 - ww + 1] + pp[k2 + ww + 1] + pp[k2 - 1] + pp[k2 + 3] + dg * pp[k2 + 1]
                k += 1
            k2 = 2 * (i * w + i)
            po[k2] += u * pp[k2]
            po[k2 + 1] += u * pp[k2 + 1]


def taylor_step_1d(double complex[::1] psi, double complex[::1] term,
                   double complex[::1] hterm, long n_min, double f,
                   double dt, int order):
    """One-particle analogue of taylor_step_2d (hopping + f*n diagonal)."""
    cdef Py_ssize_t w = psi.shape[0]
    cdef Py_ssize_t n = w - 2
    cdef double* ps = <double*> &psi[0]
    cdef double* tr = <double*> &term[0]
    cdef double* tw = <double*> &hterm[0]
    cdef double* tmp
    cdef int l
    cdef Py_ssize_t m, k2
    cdef double x, dg, hre, him, nre, nim
    fsite_arr = np.empty(w, dtype=np.float64)
    cdef double[::1] fsite = fsite_arr
    for m in range(w):
        fsite[m] = f * (n_min + m - 1)
    with nogil:
        memcpy(tr, ps, 16 * w)
        for l in range(1, order + 1):
            x = dt / l
            for m in range(1, n + 1):
                k2 = 2 * m
                dg = fsite[m]
                hre = tr[k2 - 2] + tr[k2 + 2] + dg * tr[k2]
                him = tr[k2 - 1] + tr[k2 + 3] + dg * tr[k2 + 1]
                nre = x * him
                nim = -x * hre
                tw[k2] = nre
                tw[k2 + 1] = nim
                ps[k2] += nre
                ps[k2 + 1] += nim
            tmp = tr
            tr = tw
            tw = tmp


def apply_h_1d(double complex[::1] out, double complex[::1] psi,
               long n_min, double f):
    """out <- H1 psi on padded 1D arrays (hopping + f*n diagonal)."""
    cdef Py_ssize_t w = psi.shape[0]
    cdef Py_ssize_t n = w - 2
    cdef double* po = <double*> &out[0]
    cdef double* pp = <double*> &psi[0]
    cdef Py_ssize_t m, k2
    cdef double dg
    with nogil:
        for m in range(1, n + 1):
            k2 = 2 * m
            dg = f * (n_min + m - 1)
            po[k2] = pp[k2 - 2] + pp[k2 + 2] + dg * pp[k2]
            po[k2 + 1] = pp[k2 - 1] + pp[k2 + 3] + dg * pp[k2 + 1]
