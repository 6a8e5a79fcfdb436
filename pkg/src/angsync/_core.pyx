# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Semantics mirror :mod:`angsync._core_py` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport zgemv

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def mixing_sweeps(const cnp.int64_t[::1] indptr,
                  const cnp.int64_t[::1] indices,
                  const cplx[::1] data,
                  cplx[:, ::1] V,
                  Py_ssize_t n_sweeps):
    """Block-coordinate sweeps over the rows of ``V`` (in place).

    Row ``i`` becomes the unit vector along ``sum_j K[i, j] V[j]``, with
    ``K`` in CSR form. Rows whose update vanishes are left unchanged.
    """
    cdef Py_ssize_t d = V.shape[0]
    cdef Py_ssize_t p = V.shape[1]
    cdef Py_ssize_t s, i, k, c, j
    cdef double kr, ki, vr, vi, nrm
    # real views; complex products written out to avoid the slow C99 path
    cdef const double[::1] kd = np.asarray(data).view(np.float64)
    cdef double[:, ::1] Vd = np.asarray(V).view(np.float64)
    cdef double[::1] g = np.empty(2 * p, dtype=np.float64)
    with nogil:
        for s in range(n_sweeps):
            for i in range(d):
                for c in range(2 * p):
                    g[c] = 0.0
                for k in range(indptr[i], indptr[i + 1]):
                    j = indices[k]
                    kr = kd[2 * k]
                    ki = kd[2 * k + 1]
                    for c in range(p):
                        vr = Vd[j, 2 * c]
                        vi = Vd[j, 2 * c + 1]
                        g[2 * c] += kr * vr - ki * vi
                        g[2 * c + 1] += kr * vi + ki * vr
                nrm = 0.0
                for c in range(2 * p):
                    nrm += g[c] * g[c]
                if nrm > 0.0:
                    nrm = sqrt(nrm)
                    for c in range(2 * p):
                        Vd[i, c] = g[c] / nrm


cdef void _matvec(const cplx[:, ::1] S, const cplx[::1] u, cplx[::1] out) nogil:
    # row-major S is column-major S^T, so "T" gives S u
    cdef int d = <int>S.shape[0]
    cdef int inc = 1
    cdef char trans = b"T"
    cdef cplx one = 1.0
    cdef cplx zero = 0.0
    zgemv(&trans, &d, &d, &one, <cplx*>&S[0, 0], &d, <cplx*>&u[0], &inc, &zero, &out[0], &inc)


def gpm(const cplx[:, ::1] S, double shift, u0, Py_ssize_t max_iter, double rtol, double atol):
    """Generalized power method ``u <- sgn(S u)`` with ``S = shift*I - L``.

    Returns ``(u, history, converged)`` where ``history[k]`` is ``u_k^* L u_k``
    for each accepted iterate. Stops when the decrease falls below
    ``rtol * objective + atol`` or when an update would increase the
    objective, keeping the better iterate.
    """
    cdef Py_ssize_t d = S.shape[0]
    cdef cplx[::1] u = np.array(u0, dtype=np.complex128, copy=True)
    cdef cplx[::1] w = np.empty(d, dtype=np.complex128)
    cdef cplx[::1] cand = np.empty(d, dtype=np.complex128)
    cdef double[::1] hist = np.empty(max_iter + 1, dtype=np.float64)
    cdef Py_ssize_t it, i, n_hist
    cdef double obj, new_obj, m, sq
    cdef cplx acc
    cdef bint converged = False

    _matvec(S, u, w)
    sq = 0.0
    acc = 0
    for i in range(d):
        sq = sq + cabs2(u[i])
        acc = acc + u[i].conjugate() * w[i]
    obj = shift * sq - acc.real
    hist[0] = obj
    n_hist = 1
    with nogil:
        for it in range(max_iter):
            for i in range(d):
                m = cabs2(w[i])
                if m > 0.0:
                    cand[i] = w[i] / sqrt(m)
                else:
                    cand[i] = u[i]
            _matvec(S, cand, w)
            sq = 0.0
            acc = 0
            for i in range(d):
                sq = sq + cabs2(cand[i])
                acc = acc + cand[i].conjugate() * w[i]
            new_obj = shift * sq - acc.real
            if new_obj > obj:
                converged = True
                break
            for i in range(d):
                u[i] = cand[i]
            hist[n_hist] = new_obj
            n_hist = n_hist + 1
            if obj - new_obj <= rtol * obj + atol:
                converged = True
                break
            obj = new_obj
    return np.asarray(u), np.asarray(hist[:n_hist]).copy(), bool(converged)
