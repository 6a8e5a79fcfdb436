import numpy as np
import pytest
import scipy.sparse as sp

from angsync import _backend, _core_py
from angsync.bounds import phase_distance
from angsync.solvers import solve_lsp, solve_sdp

from conftest import make_instance

needs_compiled = pytest.mark.skipif(not _backend.has_compiled(), reason="extension not built")


@pytest.fixture
def python_backend():
    previous = _backend.use_backend("python")
    yield
    _backend.use_backend(previous)


def _coupling(g, xhat):
    c = sp.csr_matrix(np.where(g.adjacency > 0, g.weights * xhat, 0))
    return c.indptr.astype(np.int64), c.indices.astype(np.int64), c.data.astype(np.complex128)


def test_use_backend_roundtrip():
    start = _backend.name()
    prev = _backend.use_backend("python")
    assert _backend.name() == "python"
    assert _backend.kernels() is _core_py
    _backend.use_backend(prev)
    assert _backend.name() == start
    with pytest.raises(ValueError):
        _backend.use_backend("fortran")


@needs_compiled
def test_mixing_sweeps_match():
    from angsync import _core

    g, ms = make_instance(30, 6, "amplitude", 20.0, seed=3)
    args = _coupling(g, ms.Xhat)
    rng = np.random.default_rng(0)
    V = rng.standard_normal((30, 5)) + 1j * rng.standard_normal((30, 5))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    a, b = V.copy(), V.copy()
    _core.mixing_sweeps(*args, a, 7)
    _core_py.mixing_sweeps(*args, b, 7)
    np.testing.assert_allclose(a, b, atol=1e-12)


@needs_compiled
def test_gpm_match():
    from angsync import _core

    g, ms = make_instance(25, 5, "unit", 30.0, seed=4)
    lap = np.diag(g.degrees) - g.weights * ms.Xhat
    shift = 2 * g.degrees.max()
    S = np.ascontiguousarray(shift * np.eye(25) - lap)
    u0 = np.exp(1j * np.linspace(0, 1, 25))
    ua, ha, ca = _core.gpm(S, shift, u0, 500, 1e-12, 1e-13)
    ub, hb, cb = _core_py.gpm(S, shift, u0, 500, 1e-12, 1e-13)
    np.testing.assert_allclose(np.asarray(ua), ub, atol=1e-10)
    np.testing.assert_allclose(np.asarray(ha), hb, rtol=1e-12)
    assert ca == cb


@pytest.mark.parametrize("scheme", ["unit", "squared"])
def test_solvers_agree_across_backends(scheme, python_backend):
    g, ms = make_instance(20, 4, scheme, 15.0, seed=8)
    py_lsp = solve_lsp(g, ms.Xhat)
    py_sdp = solve_sdp(g, ms.Xhat)
    _backend.use_backend("compiled" if _backend.has_compiled() else "python")
    lsp = solve_lsp(g, ms.Xhat)
    sdp = solve_sdp(g, ms.Xhat)
    assert lsp.objective == pytest.approx(py_lsp.objective, rel=1e-9, abs=1e-12)
    assert sdp.objective == pytest.approx(py_sdp.objective, rel=1e-7, abs=1e-10)
    assert phase_distance(sdp.x_round, py_sdp.x_round) <= 1e-5
