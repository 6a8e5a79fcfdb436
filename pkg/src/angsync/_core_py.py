"""Pure-Python fallback for the compiled kernels in ``_core.pyx``."""
from __future__ import annotations

import numpy as np


def mixing_sweeps(indptr, indices, data, V, n_sweeps):
    d = V.shape[0]
    for _ in range(n_sweeps):
        for i in range(d):
            lo, hi = indptr[i], indptr[i + 1]
            g = data[lo:hi] @ V[indices[lo:hi]]
            nrm = np.linalg.norm(g)
            if nrm > 0.0:
                V[i] = g / nrm


def gpm(S, shift, u0, max_iter, rtol, atol):
    u = np.array(u0, dtype=np.complex128, copy=True)
    w = S @ u
    obj = shift * np.vdot(u, u).real - np.vdot(u, w).real
    hist = [obj]
    converged = False
    for _ in range(max_iter):
        mag = np.abs(w)
        cand = np.where(mag > 0, w / np.where(mag > 0, mag, 1.0), u)
        w = S @ cand
        new_obj = shift * np.vdot(cand, cand).real - np.vdot(cand, w).real
        if new_obj > obj:
            converged = True
            break
        u = cand
        hist.append(new_obj)
        if obj - new_obj <= rtol * obj + atol:
            converged = True
            break
        obj = new_obj
    return u, np.array(hist), converged
