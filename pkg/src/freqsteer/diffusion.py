"""Diffusion machinery on analytic and synthetic models.

Noising convention: the latent at level t is signal plus accumulated noise,
x_t = x_0 + sigma_cum[t] * eps, with a geometric sigma ladder
(sigma_cum[T] = sigma_max down to sigma_cum[1] = sigma_min, sigma_cum[0] = 0).
The signal is carried at unit gain; the variance-preserving-style signal
coefficient 1/sqrt(1 + sigma_cum^2) is exposed for reference but unused by
the sampler. Geometric spacing makes the per-step reverse noise strictly
shrink as t decreases and keeps the Gaussian-mixture posterior mean in
closed form.

A reverse transition t -> t-1 is x_{t-1} = mu + sigma_step[t] * z where a
denoiser supplies mu = blend[t] * x_t + (1 - blend[t]) * x0_hat,
blend[t] = (sigma_cum[t-1] / sigma_cum[t])^2. At t = 1 the blend and the
step noise are both zero, so the final transition deterministically lands
on the clean prediction.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._kernels import blur2d
from .errors import NumericalError
from .spectral import gaussian_kernel1d
from .tensor import Rng, require_image, require_same_shape

_DEGRADE_NOISE_TAG = 0x5EED_D06E
_TEXTURE_TAG = 0x7E47_0001


@dataclass(frozen=True)
class NoiseSchedule:
    timesteps: int
    sigma_step: np.ndarray  # (T+1,) per-step reverse noise; index t drives t -> t-1
    sigma_cum: np.ndarray  # (T+1,) accumulated noise level at t; [0] == 0
    blend: np.ndarray  # (T+1,) convex mu coefficient on x_t

    @property
    def signal_coef(self) -> np.ndarray:
        return 1.0 / np.sqrt(1.0 + self.sigma_cum**2)

    def check_timestep(self, t: int) -> int:
        t = int(t)
        if not 1 <= t <= self.timesteps:
            raise ValueError(f"timestep {t} outside [1, {self.timesteps}]")
        return t


def geometric_schedule(timesteps: int = 15, sigma_max: float = 1.0, sigma_min: float = 0.05) -> NoiseSchedule:
    if timesteps < 1:
        raise ValueError("timesteps must be >= 1")
    if not 0 < sigma_min <= sigma_max:
        raise ValueError("need 0 < sigma_min <= sigma_max")
    t_idx = np.arange(1, timesteps + 1, dtype=np.float64)
    if timesteps == 1:
        cum = np.array([sigma_max])
    else:
        cum = sigma_min * (sigma_max / sigma_min) ** ((t_idx - 1) / (timesteps - 1))
    sigma_cum = np.concatenate([[0.0], cum])
    blend = np.zeros(timesteps + 1)
    sigma_step = np.zeros(timesteps + 1)
    for t in range(1, timesteps + 1):
        ratio = sigma_cum[t - 1] / sigma_cum[t]
        blend[t] = ratio * ratio
        sigma_step[t] = sigma_cum[t - 1] * np.sqrt(max(1.0 - ratio * ratio, 0.0))
    return NoiseSchedule(timesteps=timesteps, sigma_step=sigma_step, sigma_cum=sigma_cum, blend=blend)


def reverse_step(mu, sigma_t: float, rng: Rng) -> np.ndarray:
    """One ancestral draw: mu + sigma_t * z with fresh standard normal z."""
    mu = require_image(mu, "mu")
    if sigma_t < 0:
        raise ValueError("sigma_t must be nonnegative")
    out = mu + sigma_t * rng.normal(mu.shape)
    if not np.all(np.isfinite(out)):
        raise NumericalError("reverse step produced non-finite values")
    return out


# ---------------------------------------------------------------- GMM model


@dataclass(frozen=True)
class GmmPrior:
    """Isotropic Gaussian mixture over image tensors: sum_k w_k N(m_k, s^2 I)."""

    means: np.ndarray  # (K, C, H, W)
    weights: np.ndarray  # (K,), positive, sums to 1
    component_std: float

    @staticmethod
    def create(means, weights, component_std: float) -> "GmmPrior":
        m = np.stack([require_image(mi, "component mean") for mi in means])
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != m.shape[0]:
            raise ValueError("weights must be 1D with one entry per component")
        if np.any(w <= 0):
            raise ValueError("component weights must be positive")
        if component_std <= 0:
            raise ValueError("component std must be positive")
        return GmmPrior(means=m, weights=w / w.sum(), component_std=float(component_std))

    def sample(self, rng: Rng) -> np.ndarray:
        k = int(rng.integers_weighted(self.weights, 1)[0])
        return self.means[k] + self.component_std * rng.normal(self.means[k].shape)


def gmm_responsibilities(prior: GmmPrior, y, sigma_bar: float) -> np.ndarray:
    """Posterior component probabilities given y = x0 + sigma_bar * eps."""
    y = require_image(y, "y")
    var = prior.component_std**2 + sigma_bar**2
    diffs = y[None] - prior.means
    sq = np.einsum("kchw,kchw->k", diffs, diffs)
    loglik = np.log(prior.weights) - sq / (2.0 * var)
    top = loglik.max()
    if not np.isfinite(top):
        raise NumericalError(
            "all mixture responsibilities underflowed (pathological noise level or latent)"
        )
    p = np.exp(loglik - top)
    return p / p.sum()


def gmm_posterior_mean(prior: GmmPrior, y, sigma_bar: float) -> np.ndarray:
    """E[x0 | y] for y = x0 + sigma_bar * eps under the mixture prior:
    responsibility-weighted single-component shrinkages."""
    y = require_image(y, "y")
    if sigma_bar == 0.0:
        return y.copy()
    resp = gmm_responsibilities(prior, y, sigma_bar)
    mbar = np.einsum("k,kchw->chw", resp, prior.means)
    s2 = prior.component_std**2
    v2 = sigma_bar**2
    return (s2 * y + v2 * mbar) / (s2 + v2)


class GmmDenoiser:
    """Analytic denoiser for the mixture model."""

    def __init__(self, prior: GmmPrior, schedule: NoiseSchedule):
        self.prior = prior
        self.schedule = schedule
        self.shape = tuple(prior.means.shape[1:])

    def denoise(self, x_t, t: int):
        t = self.schedule.check_timestep(t)
        x0_hat = gmm_posterior_mean(self.prior, x_t, float(self.schedule.sigma_cum[t]))
        c = float(self.schedule.blend[t])
        mu = c * x_t + (1.0 - c) * x0_hat
        return mu, x0_hat


def gmm_denoise(prior: GmmPrior, x_t, t: int, schedule: NoiseSchedule):
    return GmmDenoiser(prior, schedule).denoise(x_t, t)


# ------------------------------------------------------- degradation + SR


@dataclass(frozen=True)
class DegradationOperator:
    """Gaussian blur -> subsample by an integer factor -> additive noise."""

    factor: int
    blur_size: int = 9
    blur_sigma: float = 1.5
    noise_std: float = 0.0
    noise_seed: int = 0


def degrade(x, op: DegradationOperator) -> np.ndarray:
    x = require_image(x, "x")
    f = int(op.factor)
    if f < 1:
        raise ValueError("factor must be >= 1")
    _, h, w = x.shape
    if h % f or w % f:
        raise ValueError(f"spatial dims {h}x{w} not divisible by factor {f}")
    if f > 1:
        y = blur2d(x, gaussian_kernel1d(op.blur_size, op.blur_sigma))
        off = (f - 1) // 2
        y = y[:, off::f, off::f]
    else:
        y = x
    if op.noise_std > 0:
        rng = Rng(op.noise_seed).stream(_DEGRADE_NOISE_TAG)
        y = y + op.noise_std * rng.normal(y.shape)
    return np.ascontiguousarray(y)


@lru_cache(maxsize=32)
def _catmull_rom_matrix(n_in: int, factor: int) -> np.ndarray:
    # output center j maps to input coordinate (j + 0.5)/factor - 0.5;
    # 4-tap Catmull-Rom weights, reflect-folded indices
    def kern(s):
        s = abs(s)
        if s <= 1.0:
            return 1.5 * s**3 - 2.5 * s**2 + 1.0
        if s < 2.0:
            return -0.5 * s**3 + 2.5 * s**2 - 4.0 * s + 2.0
        return 0.0

    def fold(i):
        while i < 0 or i >= n_in:
            if i < 0:
                i = -i - 1
            if i >= n_in:
                i = 2 * n_in - 1 - i
        return i

    n_out = n_in * factor
    m = np.zeros((n_out, n_in))
    for j in range(n_out):
        xsrc = (j + 0.5) / factor - 0.5
        i0 = int(np.floor(xsrc))
        frac = xsrc - i0
        for d in range(-1, 3):
            m[j, fold(i0 + d)] += kern(frac - d)
    return m


def upsample(x, factor: int) -> np.ndarray:
    """Separable Catmull-Rom upsampling by an integer factor (reflect edges).
    Exact on constants; factor 1 is the identity."""
    x = require_image(x, "x")
    f = int(factor)
    if f < 1:
        raise ValueError("factor must be >= 1")
    if f == 1:
        return x.copy()
    _, h, w = x.shape
    mh = _catmull_rom_matrix(h, f)
    mw = _catmull_rom_matrix(w, f)
    y = np.einsum("ij,cjk->cik", mh, x)
    return np.einsum("kl,cjl->cjk", mw, y)


@dataclass(frozen=True)
class TextureBank:
    """Parameters of the surrogate denoiser's hallucinated detail: a fixed
    seeded band-pass texture mixed with the latent's own band-pass
    fluctuations, both unit-RMS."""

    seed: int = 0
    kernel: int = 9
    sigma_lo: float = 1.0
    sigma_hi: float = 3.0
    detail_rms: float = 0.25
    mix: float = 0.25


def _bandpass(x, bank: TextureBank) -> np.ndarray:
    lo = blur2d(x, gaussian_kernel1d(bank.kernel, bank.sigma_lo))
    hi = blur2d(x, gaussian_kernel1d(bank.kernel, bank.sigma_hi))
    return lo - hi


def _unit_rms(x) -> np.ndarray:
    r = float(np.sqrt(np.mean(x * x)))
    return x / r if r > 1e-12 else np.zeros_like(x)


class SyntheticSrDenoiser:
    """Surrogate super-resolution denoiser.

    x0_hat = upsample(lr) + gate(t) * detail_gain * detail_rms * detail,
    gate(t) = 1 - sigma_cum[t] / sigma_cum[T], detail = mix * fixed seeded
    band-pass texture + (1 - mix) * unit-RMS band-pass of x_t itself.
    Deterministic given (x_t, t, bank.seed); detail amplitude grows as the
    trajectory approaches t = 0; detail_gain = 0 collapses to the plain
    upsample at every t.
    """

    def __init__(self, lr_condition, schedule: NoiseSchedule, factor: int,
                 bank: TextureBank = TextureBank(), detail_gain: float = 1.0):
        lr = require_image(lr_condition, "lr_condition")
        self.schedule = schedule
        self.factor = int(factor)
        self.bank = bank
        self.detail_gain = float(detail_gain)
        self.base = upsample(lr, self.factor)
        self.shape = tuple(self.base.shape)
        rng = Rng(bank.seed).stream(_TEXTURE_TAG)
        self.texture = _unit_rms(_bandpass(rng.normal(self.shape), bank))

    def denoise(self, x_t, t: int):
        t = self.schedule.check_timestep(t)
        require_same_shape(x_t, self.base, "latent and upsampled condition")
        gate = 1.0 - float(self.schedule.sigma_cum[t] / self.schedule.sigma_cum[self.schedule.timesteps])
        if self.detail_gain == 0.0:
            x0_hat = self.base.copy()
        else:
            fluct = _unit_rms(_bandpass(x_t, self.bank))
            detail = self.bank.mix * self.texture + (1.0 - self.bank.mix) * fluct
            x0_hat = self.base + gate * self.detail_gain * self.bank.detail_rms * detail
        c = float(self.schedule.blend[t])
        mu = c * x_t + (1.0 - c) * x0_hat
        return mu, x0_hat
