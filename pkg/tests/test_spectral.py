"""Frequency tools: splits, AdaIN, radial spectra."""

import numpy as np
import pytest

from freqsteer.errors import NumericalError
from freqsteer.spectral import (
    ChannelStats,
    FrequencyMask,
    adain,
    apply_mask,
    channel_stats,
    default_cutoff,
    dft2,
    gaussian_char_magnitude,
    gaussian_kernel1d,
    gaussian_split,
    highband_energy_fraction,
    idft2,
    mask_split,
    rapsd,
)


def test_dft_roundtrip(rand_image):
    x = rand_image(0, (2, 9, 7))
    np.testing.assert_allclose(idft2(dft2(x)), x, rtol=0, atol=1e-12)


def test_idft_imaginary_guard(rand_image):
    s = dft2(rand_image(1, (1, 8, 8)))
    s[0, 1, 2] += 40.0j  # breaks conjugate symmetry
    with pytest.raises(NumericalError):
        idft2(s)


def test_mask_complement_partition():
    m = FrequencyMask.lowpass(8, 8, 2.0)
    np.testing.assert_array_equal(m.values + m.complement().values, np.ones((8, 8)))


def test_mask_split_reconstructs(rand_image):
    for seed in range(10):
        x = rand_image(seed, (3, 12, 10))
        low, high = mask_split(x)
        np.testing.assert_allclose(low + high, x, rtol=0, atol=1e-12)


def test_mask_split_projector(rand_image):
    # Splitting the low band again changes nothing: masks are projectors.
    x = rand_image(3, (1, 16, 16))
    low, _ = mask_split(x, radius=3.0)
    low_again, high_rest = mask_split(low, radius=3.0)
    np.testing.assert_allclose(low_again, low, rtol=0, atol=1e-12)
    np.testing.assert_allclose(high_rest, np.zeros_like(low), rtol=0, atol=1e-12)


def test_gaussian_kernel_normalized():
    for size in (3, 9, 11):
        k = gaussian_kernel1d(size, 1.3)
        assert k.shape == (size,)
        assert abs(k.sum() - 1.0) < 1e-12
        np.testing.assert_allclose(k, k[::-1])  # symmetric


def test_gaussian_split_reconstructs(rand_image):
    x = rand_image(4, (3, 20, 20))
    low, high = gaussian_split(x)
    np.testing.assert_allclose(low + high, x, rtol=0, atol=1e-6)


def test_channel_stats_population():
    x = np.stack([np.array([[1.0, 3.0]]), np.array([[2.0, 2.0]])])
    st = channel_stats(x)
    np.testing.assert_array_equal(st.mean, [2.0, 2.0])
    np.testing.assert_array_equal(st.std, [1.0, 0.0])


def test_adain_matches_reference_stats(rand_image):
    src = rand_image(5, (3, 8, 8), scale=2.0, offset=-1.0)
    ref = rand_image(6, (3, 8, 8), scale=0.5, offset=3.0)
    out = adain(src, ref)
    got = channel_stats(out)
    want = channel_stats(ref)
    np.testing.assert_allclose(got.mean, want.mean, atol=1e-9)
    np.testing.assert_allclose(got.std, want.std, atol=1e-9)


def test_adain_identity_and_idempotence(rand_image):
    x = rand_image(7, (2, 6, 6))
    st = channel_stats(x)
    np.testing.assert_allclose(adain(x, st), x, atol=1e-9)
    ref = ChannelStats(np.array([1.0, -2.0]), np.array([0.5, 2.0]))
    once = adain(x, ref)
    np.testing.assert_allclose(adain(once, ref), once, atol=1e-9)


def test_adain_degenerate_source_channel():
    x = np.stack([np.full((4, 4), 5.0)])  # zero variance
    ref = ChannelStats(np.array([2.0]), np.array([3.0]))
    out = adain(x, ref)
    np.testing.assert_allclose(out, np.full((1, 4, 4), 2.0))


def test_rapsd_parseval(rand_image):
    x = rand_image(8, (3, 16, 16))
    prof = rapsd(x)
    total = float((prof.power * prof.counts).sum())
    want = 16 * 16 * float(np.mean(np.sum(x * x, axis=(1, 2))))
    np.testing.assert_allclose(total, want, rtol=1e-10)


def test_rapsd_pure_tone_lands_in_one_bin():
    n = 16
    grid = np.arange(n)
    x = np.cos(2 * np.pi * 3 * grid / n)[None, None, :] * np.ones((1, n, 1))
    prof = rapsd(x)
    hot = prof.power > 1e-9
    assert list(np.nonzero(hot)[0]) == [3]


def test_highband_fraction_endpoints():
    n = 16
    grid = np.arange(n)
    low = np.cos(2 * np.pi * 1 * grid / n)[None, None, :] * np.ones((1, n, 1))
    high = np.cos(2 * np.pi * 6 * grid / n)[None, None, :] * np.ones((1, n, 1))
    assert highband_energy_fraction(low) < 1e-25  # bin 1 < cutoff 2, round-off only
    assert highband_energy_fraction(high) >= 1.0 - 1e-12  # bin 6 > cutoff 2
    assert highband_energy_fraction(np.full((1, n, n), 0.7)) == 0.0
    mixed = low + high
    frac = highband_energy_fraction(mixed)
    assert 0.0 < frac < 1.0


def test_default_cutoff():
    assert default_cutoff(64, 64) == 8.0
    assert default_cutoff(32, 64) == 4.0


def test_apply_mask_zeroes_high_band(rand_image):
    x = rand_image(9, (1, 8, 8))
    m = FrequencyMask.lowpass(8, 8, 0.5)  # keeps only DC
    flat = idft2(apply_mask(dft2(x), m))
    np.testing.assert_allclose(flat, np.full_like(flat, flat.mean()), atol=1e-12)


def test_gaussian_char_magnitude_values():
    np.testing.assert_allclose(gaussian_char_magnitude(0.0, [0.0, 1.0, 2.0]), [1.0, 1.0, 1.0])
    np.testing.assert_allclose(gaussian_char_magnitude(1.0, [1.0]), [np.exp(-0.5)])
    np.testing.assert_allclose(gaussian_char_magnitude(2.0, [3.0]), [np.exp(-18.0)])
