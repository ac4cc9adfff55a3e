"""Kernel backends: reference values, backend agreement, padding rule."""

import numpy as np
import pytest
from scipy import ndimage

from freqsteer._kernels import BACKEND, numpy_backend

try:
    from freqsteer._kernels import _fastcore
except ImportError:
    _fastcore = None

BACKENDS = [numpy_backend] + ([_fastcore] if _fastcore is not None else [])

# Oracle: scipy.ndimage.correlate1d along H then W, mode="reflect"
# (half-sample symmetry), on arange(9).reshape(1,3,3) with [.25,.5,.25].
_BLUR_ORACLE = np.array([[[1.0, 1.75, 2.5],
                          [3.25, 4.0, 4.75],
                          [5.5, 6.25, 7.0]]])


@pytest.mark.parametrize("impl", BACKENDS)
def test_blur2d_frozen_oracle(impl):
    x = np.arange(9, dtype=np.float64).reshape(1, 3, 3)
    k = np.array([0.25, 0.5, 0.25])
    np.testing.assert_allclose(impl.blur2d(x, k), _BLUR_ORACLE, rtol=0, atol=1e-15)


@pytest.mark.parametrize("impl", BACKENDS)
def test_blur2d_matches_scipy_reflect(impl):
    g = np.random.default_rng(0)
    for case in range(50):
        c = int(g.integers(1, 4))
        h = int(g.integers(1, 13))
        w = int(g.integers(1, 13))
        size = int(g.integers(0, 4)) * 2 + 1
        x = g.standard_normal((c, h, w))
        k = g.random(size) + 0.1
        want = ndimage.correlate1d(x, k, axis=1, mode="reflect")
        want = ndimage.correlate1d(want, k, axis=2, mode="reflect")
        np.testing.assert_allclose(impl.blur2d(x, k), want, rtol=1e-12, atol=1e-12,
                                   err_msg=f"case {case} shape {(c, h, w)} ksize {size}")


@pytest.mark.skipif(_fastcore is None, reason="compiled backend not built")
def test_backends_agree_bitwise():
    g = np.random.default_rng(1)
    for _ in range(25):
        x = g.standard_normal((2, int(g.integers(1, 20)), int(g.integers(1, 20))))
        k = g.random(int(g.integers(0, 5)) * 2 + 1)
        a = numpy_backend.blur2d(x, k)
        b = _fastcore.blur2d(x, k)
        assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("impl", BACKENDS)
def test_blur2d_rejects_even_kernel(impl):
    x = np.zeros((1, 4, 4))
    with pytest.raises(ValueError):
        impl.blur2d(x, np.array([0.5, 0.5]))


@pytest.mark.parametrize("impl", BACKENDS)
def test_blur2d_preserves_constants(impl):
    k = np.array([0.25, 0.5, 0.25])
    x = np.full((2, 7, 5), 3.5)
    np.testing.assert_allclose(impl.blur2d(x, k), x, rtol=0, atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS)
def test_radial_power_binning(impl):
    power = np.array([[1.0, 2.0], [3.0, 4.0]])
    bins = np.array([[0, 1], [1, 2]], dtype=np.int64)
    sums, counts = impl.radial_power(power, bins, 3)
    np.testing.assert_array_equal(sums, [1.0, 5.0, 4.0])
    np.testing.assert_array_equal(counts, [1, 2, 1])


@pytest.mark.skipif(_fastcore is None, reason="compiled backend not built")
def test_radial_power_backends_agree():
    g = np.random.default_rng(2)
    for _ in range(20):
        n = int(g.integers(1, 12))
        power = g.random((n, n))
        bins = g.integers(0, 5, size=(n, n)).astype(np.int64)
        sa, ca = numpy_backend.radial_power(power, bins, 5)
        sb, cb = _fastcore.radial_power(power, bins, 5)
        np.testing.assert_allclose(sa, sb, rtol=1e-15)
        np.testing.assert_array_equal(ca, cb)


@pytest.mark.parametrize("impl", BACKENDS)
def test_widened_dot(impl):
    a = np.array([1e16, 1.0, -1e16])
    b = np.ones(3)
    # float64 naive summation loses the 1.0; a widened accumulator keeps it
    assert impl.dot_widened(a, b) == 1.0
    assert impl.sumsq_widened(np.array([3.0, 4.0])) == 25.0


def test_selected_backend_exported():
    assert BACKEND in ("compiled", "python")
