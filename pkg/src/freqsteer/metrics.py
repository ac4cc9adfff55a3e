"""Image quality metrics on (C, H, W) float tensors in [0, 1]."""

import numpy as np

from .rewards import perceptual_proxy, structural_proxy
from .spectral import gaussian_kernel1d, rapsd
from .tensor import require_image, require_same_shape

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
PSNR_CAP_DB = 100.0


def mse(a, b) -> float:
    a = require_image(a, "a")
    b = require_image(b, "b")
    require_same_shape(a, b)
    d = a - b
    return float(np.mean(d * d))


def psnr(a, b, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB, capped at 100 for identical inputs."""
    err = mse(a, b)
    if err == 0.0:
        return PSNR_CAP_DB
    value = 10.0 * np.log10(peak * peak / err)
    return float(min(value, PSNR_CAP_DB))


def _ssim_window():
    k = gaussian_kernel1d(_SSIM_WINDOW, _SSIM_SIGMA)
    return np.outer(k, k)


def ssim(a, b, peak: float = 1.0) -> float:
    """Mean structural similarity over an 11x11 Gaussian window (sigma 1.5).

    Only fully valid window positions count; borders are cropped, so inputs
    must be at least 11x11. Channels are averaged.
    """
    a = require_image(a, "a")
    b = require_image(b, "b")
    require_same_shape(a, b)
    _, h, w = a.shape
    if h < _SSIM_WINDOW or w < _SSIM_WINDOW:
        raise ValueError(f"ssim needs at least {_SSIM_WINDOW}x{_SSIM_WINDOW} images, got {h}x{w}")
    win = _ssim_window()
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2

    def filt(x):
        v = np.lib.stride_tricks.sliding_window_view(x, (_SSIM_WINDOW, _SSIM_WINDOW), axis=(1, 2))
        return np.einsum("chwij,ij->chw", v, win)

    mu_a = filt(a)
    mu_b = filt(b)
    mu_aa = filt(a * a)
    mu_bb = filt(b * b)
    mu_ab = filt(a * b)
    var_a = mu_aa - mu_a * mu_a
    var_b = mu_bb - mu_b * mu_b
    cov = mu_ab - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def band_error_profile(x, reference):
    """Radially binned relative spectral error |P_x - P_ref| / (P_ref + tiny).

    Returns (radii, relative_error) so low- vs high-band convergence can be
    tracked separately over the course of sampling.
    """
    x = require_image(x, "x")
    reference = require_image(reference, "reference")
    require_same_shape(x, reference)
    px = rapsd(x)
    pr = rapsd(reference)
    tiny = 1e-12
    rel = np.abs(px.power - pr.power) / (pr.power + tiny)
    return px.radii, rel


def combined_quality(x, reference, structural_scale: float = 0.5, cutoff: float = None) -> float:
    """Perceptual proxy minus scaled structural distance to the reference.

    The single scalar used to compare strategies: higher is better. Same
    normalizer convention as the reward interface.
    """
    return perceptual_proxy(x, cutoff=cutoff) - structural_proxy(x, reference) / structural_scale
