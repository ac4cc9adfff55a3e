"""Image quality metrics."""

import numpy as np
import pytest

from freqsteer.metrics import band_error_profile, combined_quality, mse, psnr, ssim
from freqsteer.rewards import perceptual_proxy, structural_proxy


def test_mse_hand_value():
    a = np.array([[[0.0, 0.5]]])
    b = np.array([[[0.25, 0.75]]])
    assert mse(a, b) == 0.0625


def test_psnr_hand_value():
    a = np.array([[[0.0, 0.5]]])
    b = np.array([[[0.25, 0.75]]])
    # mse 0.0625 -> 10*log10(1/0.0625) = 10*log10(16)
    np.testing.assert_allclose(psnr(a, b), 10.0 * np.log10(16.0), rtol=1e-12)


def test_psnr_identical_hits_cap(rand_image):
    x = rand_image(0)
    assert psnr(x, x) == 100.0
    near = x + 1e-9
    assert psnr(x, near) == 100.0  # cap also applies to vanishing error


def test_psnr_peak_scaling(rand_image):
    x = rand_image(1)
    y = rand_image(2)
    np.testing.assert_allclose(psnr(2 * x, 2 * y, peak=2.0), psnr(x, y), rtol=1e-12)


def test_ssim_identical_is_one(rand_image):
    x = rand_image(3, (3, 16, 16))
    assert ssim(x, x) == pytest.approx(1.0, abs=1e-12)


def test_ssim_constant_pair_analytic():
    # constant images: variances and covariance vanish, so
    # ssim = (2ab + c1) / (a^2 + b^2 + c1) with c1 = (0.01 * peak)^2
    a = np.full((1, 16, 16), 0.25)
    b = np.full((1, 16, 16), 0.75)
    np.testing.assert_allclose(ssim(a, b), 0.6000639897616381, rtol=1e-12)
    c = np.full((1, 16, 16), 0.4)
    d = np.full((1, 16, 16), 0.5)
    np.testing.assert_allclose(ssim(c, d), 0.9756157034869544, rtol=1e-12)


def test_ssim_degrades_with_noise(rand_image):
    g = np.random.default_rng(5)
    x = np.clip(rand_image(4, (1, 24, 24), offset=0.5), 0, 1)
    noisy = x + 0.1 * g.standard_normal(x.shape)
    s = ssim(x, noisy)
    assert 0.0 < s < 1.0


def test_ssim_rejects_small_images():
    x = np.zeros((1, 8, 8))
    with pytest.raises(ValueError):
        ssim(x, x)


def test_ssim_symmetry(rand_image):
    x = rand_image(6, (2, 16, 16))
    y = rand_image(7, (2, 16, 16))
    np.testing.assert_allclose(ssim(x, y), ssim(y, x), rtol=1e-12)


def test_band_error_profile_identical_is_zero(rand_image):
    x = rand_image(8, (1, 16, 16))
    radii, err = band_error_profile(x, x)
    assert radii.shape == err.shape
    np.testing.assert_array_equal(err, np.zeros_like(err))


def test_band_error_profile_detects_band_change(rand_image):
    from freqsteer.spectral import mask_split
    x = rand_image(9, (1, 16, 16))
    low, high = mask_split(x, 3.0)
    boosted = low + 2.0 * high
    radii, err = band_error_profile(boosted, x)
    inner = err[radii <= 2.5]
    outer = err[radii >= 3.5]
    assert inner.max() < 1e-12
    assert outer.min() > 0.5  # power quadrupled in the boosted band


def test_combined_quality_composition(rand_image):
    x = np.clip(rand_image(10, (1, 16, 16), offset=0.5), 0, 1)
    ref = np.clip(rand_image(11, (1, 16, 16), offset=0.5), 0, 1)
    got = combined_quality(x, ref, structural_scale=0.5)
    want = perceptual_proxy(x) - structural_proxy(x, ref) / 0.5
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_combined_quality_prefers_reference_itself(rand_image):
    ref = np.clip(rand_image(12, (1, 16, 16), offset=0.5), 0, 1)
    g = np.random.default_rng(13)
    off = np.clip(ref + 0.3 * g.standard_normal(ref.shape), 0, 1)
    assert combined_quality(ref, ref) > combined_quality(off, ref)
