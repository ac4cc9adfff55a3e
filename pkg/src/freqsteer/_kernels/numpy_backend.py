"""NumPy implementations of the hot kernels.

This is the reference backend; the compiled extension in _fastcore.pyx must
agree with these to float64 round-off. All three kernels sit on the inner
loops of sampling runs (blur: frequency split, reward pyramid, SSIM windows,
degradation; radial binning: every RAPSD; widened dot: similarity weights).

Padding convention: half-sample symmetry, i.e. the edge sample is repeated
(np.pad mode "symmetric"; scipy.ndimage calls the same rule "reflect").
Defined for any extent >= 1.
"""

import numpy as np


def blur2d(x, kernel):
    """Separable 2D convolution of a (C, H, W) tensor with an odd-length
    1D kernel applied along H then W, reflect-padded."""
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 1 or k.size % 2 == 0:
        raise ValueError("kernel must be 1D with odd length")
    r = k.size // 2
    c, h, w = x.shape
    if r > 0:
        xp = np.pad(x, ((0, 0), (r, r), (0, 0)), mode="symmetric")
        tmp = np.zeros_like(x)
        for i in range(k.size):
            tmp += k[i] * xp[:, i : i + h, :]
        xp = np.pad(tmp, ((0, 0), (0, 0), (r, r)), mode="symmetric")
        out = np.zeros_like(x)
        for i in range(k.size):
            out += k[i] * xp[:, :, i : i + w]
        return out
    return x * k[0] * k[0]


def radial_power(power, bins, nbins):
    """Sum `power` into `nbins` annuli indexed by the integer map `bins`.
    Returns (sums, counts)."""
    flat_bins = bins.ravel()
    sums = np.bincount(flat_bins, weights=power.ravel(), minlength=nbins)
    counts = np.bincount(flat_bins, minlength=nbins)
    return sums, counts


def dot_widened(a, b):
    """Dot product with widened (extended-precision) accumulation."""
    aw = a.ravel().astype(np.longdouble)
    bw = b.ravel().astype(np.longdouble)
    return float(np.dot(aw, bw))


def sumsq_widened(a):
    aw = a.ravel().astype(np.longdouble)
    return float(np.dot(aw, aw))
