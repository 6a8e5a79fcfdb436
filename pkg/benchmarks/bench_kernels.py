"""Compiled vs pure-Python kernel timings.

Times the two inner loops that have compiled twins (the SDP mixing sweeps
and the generalized power method), first as bare kernels and then through
the public solvers, on the band graph at 60 degrees of unit-weight noise.
Usage::

    python3 benchmarks/bench_kernels.py --dims 32,64,128 --repeats 3
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np
import scipy.sparse as sp

from angsync import _backend
from angsync.graph import banded_graph, data_laplacian
from angsync.solvers import solve_er, solve_lsp, solve_sdp
from angsync.synth import apply_angular_noise, build_weights, random_signal


def _instance(d: int, seed: int = 0):
    ms = apply_angular_noise(random_signal(d, seed), banded_graph(d, max(2, d // 4)), 60.0, seed + 1)
    return build_weights(ms, "unit"), ms


def _time(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _kernel_cases(g, ms, x0):
    """Bare kernel calls with fixed work: 50 sweeps, 200 GPM steps."""
    coupling = sp.csr_matrix(np.where(g.adjacency > 0, g.weights * ms.Xhat, 0))
    indptr = coupling.indptr.astype(np.int64)
    indices = coupling.indices.astype(np.int64)
    data = coupling.data.astype(np.complex128)
    rng = np.random.default_rng(0)
    V0 = rng.standard_normal((g.d, 8)) + 1j * rng.standard_normal((g.d, 8))
    V0 /= np.linalg.norm(V0, axis=1, keepdims=True)
    shift = 2.0 * float(g.degrees.max())
    S = np.ascontiguousarray(shift * np.eye(g.d) - data_laplacian(g, ms.Xhat))
    u0 = np.exp(1j * rng.uniform(0, 2 * np.pi, g.d))

    def sweeps():
        _backend.kernels().mixing_sweeps(indptr, indices, data, V0.copy(), 50)

    def gpm():
        _backend.kernels().gpm(S, shift, u0, 200, 0.0, -1.0)

    return {"mixing": sweeps, "gpm": gpm}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="32,64,128")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    if not _backend.has_compiled():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    print(f"{'d':>5} {'case':>6} {'python [s]':>11} {'compiled [s]':>13} {'speedup':>8}")
    for d in (int(x) for x in args.dims.split(",")):
        g, ms = _instance(d)
        x0 = solve_er(g, ms.Xhat).x_round
        cases = _kernel_cases(g, ms, x0)
        cases["sdp"] = lambda: solve_sdp(g, ms.Xhat)
        cases["lsp"] = lambda: solve_lsp(g, ms.Xhat, x0)
        for label, fn in cases.items():
            times = {}
            for which in ("python", "compiled"):
                previous = _backend.use_backend(which)
                try:
                    fn()  # warm up
                    times[which] = _time(fn, args.repeats)
                finally:
                    _backend.use_backend(previous)
            speedup = times["python"] / times["compiled"]
            print(f"{d:>5} {label:>6} {times['python']:>11.4f} {times['compiled']:>13.4f} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
