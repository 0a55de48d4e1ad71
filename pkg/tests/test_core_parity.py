"""The compiled quadrature core and the numpy fallback implement the same
contract; these tests pin them against each other bit-tightly."""

import numpy as np
import pytest

from bmolab._core import _pycore

try:
    from bmolab._core import _quadcore
except ImportError:
    _quadcore = None

needs_ext = pytest.mark.skipif(_quadcore is None, reason="compiled core not built")


def _sample_args(n_dim, rng):
    m, ny, nz = 7, 40, 36
    xs = rng.uniform(-2, 2, (m, n_dim))
    ynodes = rng.uniform(-1.5, 1.5, (ny, n_dim))
    znodes = rng.uniform(-1.5, 1.5, (nz, n_dim))
    return dict(
        xs=xs,
        bxs=rng.normal(size=m),
        ynodes=ynodes,
        fvals=rng.normal(size=ny),
        b_at_y=rng.normal(size=ny),
        znodes=znodes,
        gvals=rng.normal(size=nz),
        b_at_z=rng.normal(size=nz),
        cell_weight=0.003,
    )


@needs_ext
@pytest.mark.parametrize("n_dim", [1, 2])
@pytest.mark.parametrize("shape_kind", [0, 1])
@pytest.mark.parametrize("trunc_mode,eta", [(0, 0.0), (1, 0.5), (2, 0.25)])
@pytest.mark.parametrize("phi_mode,A", [(0, 0.0), (1, 0.0), (2, 12.0), (3, 12.0)])
@pytest.mark.parametrize("b_mode", [0, 1, 2])
def test_backends_agree(n_dim, shape_kind, trunc_mode, eta, phi_mode, A, b_mode):
    rng = np.random.default_rng(42 + n_dim)
    args = _sample_args(n_dim, rng)
    kw = dict(shape_kind=shape_kind, n_dim=n_dim, eta=eta, trunc_mode=trunc_mode,
              phi_mode=phi_mode, A=A, b_mode=b_mode, absolute=False, xy_factor=False)
    a = _pycore.bilinear_sum(**args, **kw)
    b = _quadcore.bilinear_sum(**args, **kw)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@needs_ext
@pytest.mark.parametrize("absolute,xy_factor", [(True, False), (False, True), (True, True)])
def test_backends_agree_modifiers(absolute, xy_factor):
    rng = np.random.default_rng(7)
    args = _sample_args(1, rng)
    kw = dict(shape_kind=0, n_dim=1, eta=0.5, trunc_mode=1, phi_mode=3, A=10.0,
              b_mode=1, absolute=absolute, xy_factor=xy_factor)
    a = _pycore.bilinear_sum(**args, **kw)
    b = _quadcore.bilinear_sum(**args, **kw)
    assert a == pytest.approx(b, rel=1e-12)


@needs_ext
def test_cutoff_parity_on_grid():
    from bmolab._cutoffs import phi1, phi2, phi3

    t = np.linspace(0.0, 40.0, 20001)
    # drive the compiled cutoffs through a kernel call with f = delta-like
    # weights: simpler to compare the pure formulas via one-node sums
    ones = np.ones(1)
    zeros = np.zeros(1)
    for A in (10.0, 24.0):
        for mode, ref in ((1, phi1(t)), (2, phi2(t, A)), (3, phi3(t, A))):
            got = np.array([
                _quadcore.bilinear_sum(
                    np.array([[0.0]]), zeros, np.array([[-ti / 2]]), ones, zeros,
                    np.array([[ti / 2]]), ones, zeros, 1.0, 0, 1, 0.0, 0,
                    mode, A, 0, False, False,
                )[0]
                for ti in t[:201]
            ])
            base = (1.0 + t[:201] ** 2 / 2.0) ** -2.0
            assert got == pytest.approx(base * ref[:201], rel=1e-12, abs=1e-300)


def test_selected_backend_exposed():
    import bmolab

    assert bmolab.BACKEND in ("cython", "python")
