"""Frequency-domain machinery: DFT wrappers, complementary masks, the
spatial Gaussian frequency split, AdaIN statistics alignment, radially
averaged power spectra, and the Gaussian characteristic-function magnitude.

Frequency coordinates follow the DFT layout of numpy.fft (DC at index
[0, 0]); radii are computed from the signed integer frequencies, so every
mask built here is conjugate-symmetric by construction. For rectangular
grids the radius is normalized per axis and rescaled by min(H, W), which
reduces to the plain integer radius sqrt(ku^2 + kv^2) on square grids.

Two frequency splits exist with different contracts:

* mask_split: ideal low/high projectors in the DFT domain. Exactly
  complementary (low + high == x to round-off) and idempotent; the theory
  path.
* gaussian_split: separable spatial blur (default 9 taps, sigma 1.0,
  reflect padding), high = x - low. Exactly complementary by construction
  but not a projector; the production path used inside AFS refinement.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import blur2d, radial_power
from .errors import NumericalError
from .tensor import require_image, require_same_shape


def default_cutoff(h: int, w: int) -> float:
    """Default low/high cutoff radius: min(H, W) / 8."""
    return min(h, w) / 8.0


@lru_cache(maxsize=64)
def _radius_grid(h: int, w: int):
    fu = np.fft.fftfreq(h)[:, None]
    fv = np.fft.fftfreq(w)[None, :]
    r = min(h, w) * np.sqrt(fu * fu + fv * fv)
    bins = np.rint(r).astype(np.int64)
    return r, bins, int(bins.max()) + 1


def dft2(x) -> np.ndarray:
    """Unnormalized forward 2D DFT per channel."""
    x = require_image(x, "x")
    return np.fft.fft2(x, axes=(-2, -1))


def idft2(s, max_imag_frac: float = 1e-3) -> np.ndarray:
    """Inverse 2D DFT per channel; the result must be essentially real.

    A max imaginary residue above max_imag_frac * ||real part|| signals a
    non-conjugate-symmetric spectrum (e.g. a broken mask) and raises
    NumericalError.
    """
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 3:
        raise ValueError("spectrum must be rank-3 (C, H, W)")
    z = np.fft.ifft2(s, axes=(-2, -1))
    resid = float(np.abs(z.imag).max())
    real = np.ascontiguousarray(z.real)
    norm = float(np.linalg.norm(real.ravel()))
    if resid > max_imag_frac * norm:
        raise NumericalError(
            f"inverse DFT imaginary residue {resid:.3e} exceeds {max_imag_frac:g} * ||x|| = "
            f"{max_imag_frac * norm:.3e}; spectrum is not conjugate-symmetric"
        )
    return real


@dataclass(frozen=True)
class FrequencyMask:
    """Real-valued mask over the DFT grid, conjugate-symmetric."""

    kind: str
    values: np.ndarray  # (H, W) float64, DFT layout

    @staticmethod
    def lowpass(h: int, w: int, radius: float) -> "FrequencyMask":
        r, _, _ = _radius_grid(h, w)
        return FrequencyMask("lowpass", (r <= radius).astype(np.float64))

    @staticmethod
    def highpass(h: int, w: int, radius: float) -> "FrequencyMask":
        return FrequencyMask.lowpass(h, w, radius).complement("highpass")

    @staticmethod
    def gaussian(h: int, w: int, sigma_f: float) -> "FrequencyMask":
        if sigma_f <= 0:
            raise ValueError("sigma_f must be positive")
        r, _, _ = _radius_grid(h, w)
        return FrequencyMask("gaussian", np.exp(-(r * r) / (2.0 * sigma_f * sigma_f)))

    def complement(self, kind: str = None) -> "FrequencyMask":
        return FrequencyMask(kind or f"complement-{self.kind}", 1.0 - self.values)


def apply_mask(s, mask: FrequencyMask) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    if s.shape[-2:] != mask.values.shape:
        raise ValueError(f"mask shape {mask.values.shape} does not match spectrum {s.shape}")
    return s * mask.values


def mask_split(x, radius: float = None):
    """Ideal projector split; returns (low, high) with low + high == x.

    The high band is the exact complement x - low, so reconstruction is
    precise by construction and only the low band pays transform round-off.
    """
    x = require_image(x, "x")
    _, h, w = x.shape
    if radius is None:
        radius = default_cutoff(h, w)
    low = idft2(apply_mask(dft2(x), FrequencyMask.lowpass(h, w, radius)))
    return low, x - low


def gaussian_kernel1d(size: int = 9, sigma: float = 1.0) -> np.ndarray:
    """Sampled, normalized 1D Gaussian; size must be odd."""
    if size < 1 or size % 2 == 0:
        raise ValueError("kernel size must be odd and >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d = np.arange(size, dtype=np.float64) - size // 2
    k = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_split(x, size: int = 9, sigma: float = 1.0):
    """Spatial-domain split: low = separable Gaussian blur, high = x - low."""
    x = require_image(x, "x")
    low = blur2d(x, gaussian_kernel1d(size, sigma))
    return low, x - low


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel mean and population std over the spatial extent."""

    mean: np.ndarray  # (C,)
    std: np.ndarray  # (C,)


def channel_stats(x) -> ChannelStats:
    x = require_image(x, "x")
    flat = x.reshape(x.shape[0], -1)
    return ChannelStats(mean=flat.mean(axis=1), std=flat.std(axis=1))


def adain(source, reference, eps: float = 1e-6) -> np.ndarray:
    """Align source's per-channel mean/std to the reference's.

    eps floors the source variance: a channel whose population variance is
    <= eps is replaced by the reference-mean plane (no finite rescale can
    give a flat channel the target spread).
    """
    source = require_image(source, "source")
    stats = reference if isinstance(reference, ChannelStats) else channel_stats(reference)
    if stats.mean.shape[0] != source.shape[0]:
        raise ValueError("reference stats must match the source channel count")
    src = channel_stats(source)
    out = np.empty_like(source)
    for c in range(source.shape[0]):
        if src.std[c] ** 2 <= eps:
            out[c] = stats.mean[c]
        else:
            out[c] = stats.std[c] * (source[c] - src.mean[c]) / src.std[c] + stats.mean[c]
    return out


@dataclass(frozen=True)
class RapsdProfile:
    """Radially averaged power spectral density.

    power[r] is the mean of |F|^2 (averaged over channels first) across the
    annulus of coordinates whose rounded radius is r; counts[r] is the
    annulus size, so (power * counts).sum() equals the total spectral
    energy. Stored linear; log scaling is presentation-side.
    """

    radii: np.ndarray  # (R,) int64
    power: np.ndarray  # (R,) float64
    counts: np.ndarray  # (R,) int64


def rapsd(x) -> RapsdProfile:
    x = require_image(x, "x")
    _, h, w = x.shape
    f = dft2(x)
    power = (f.real * f.real + f.imag * f.imag).mean(axis=0)
    _, bins, nbins = _radius_grid(h, w)
    sums, counts = radial_power(power, bins, nbins)
    counts = np.asarray(counts, dtype=np.int64)
    mean_power = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    return RapsdProfile(radii=np.arange(nbins, dtype=np.int64), power=mean_power, counts=counts)


def highband_energy_fraction(x, cutoff: float = None) -> float:
    """Fraction of non-DC spectral energy at radii above the cutoff.

    A constant image has zero non-DC energy; the fraction is defined as 0
    there. Always in [0, 1].
    """
    x = require_image(x, "x")
    _, h, w = x.shape
    if cutoff is None:
        cutoff = default_cutoff(h, w)
    prof = rapsd(x)
    energy = prof.power * prof.counts
    total = float(energy[1:].sum())
    if total <= 0.0:
        return 0.0
    high = float(energy[prof.radii > cutoff].sum())
    return min(max(high / total, 0.0), 1.0)


def gaussian_char_magnitude(sigma: float, omega_norms) -> np.ndarray:
    """|characteristic function| of N(mu, sigma^2 I) at frequency norms:
    exp(-sigma^2 ||omega||^2 / 2). Independent of the mean."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    om = np.asarray(omega_norms, dtype=np.float64)
    return np.exp(-0.5 * sigma * sigma * om * om)
