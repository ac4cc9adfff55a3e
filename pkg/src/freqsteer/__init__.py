"""Reward-guided inference-time scaling for diffusion samplers, with
adaptive frequency steering and analytically verifiable test models."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .diffusion import (
    DegradationOperator,
    GmmDenoiser,
    GmmPrior,
    NoiseSchedule,
    SyntheticSrDenoiser,
    TextureBank,
    degrade,
    geometric_schedule,
    gmm_posterior_mean,
    reverse_step,
    upsample,
)
from .errors import ConfigError, FreqsteerError, MissingInputError, NumericalError
from .metrics import band_error_profile, combined_quality, psnr, ssim
from .rewards import (
    PerceptualReward,
    RewardSchedule,
    StructuralReward,
    linear_weight,
    perceptual_proxy,
    schedule_reward,
    schedule_segment,
    structural_proxy,
)
from .spectral import (
    ChannelStats,
    FrequencyMask,
    adain,
    channel_stats,
    gaussian_split,
    highband_energy_fraction,
    mask_split,
    rapsd,
)
from .steering import AfsConfig, ParticlePool, afs_refine, lowfreq_reference, select_best, similarity_weights
from .strategies import (
    RunRecord,
    StrategyConfig,
    expected_denoiser_calls,
    run_beam,
    run_bon,
    run_fk_smc,
    run_iafs,
    run_kds,
    run_strategy,
    run_vanilla,
)
from .tensor import Rng

__version__ = "0.1.0"

__all__ = [
    "AfsConfig",
    "ChannelStats",
    "ConfigError",
    "DegradationOperator",
    "FreqsteerError",
    "FrequencyMask",
    "GmmDenoiser",
    "GmmPrior",
    "KERNEL_BACKEND",
    "MissingInputError",
    "NoiseSchedule",
    "NumericalError",
    "ParticlePool",
    "PerceptualReward",
    "RewardSchedule",
    "Rng",
    "RunRecord",
    "StrategyConfig",
    "StructuralReward",
    "SyntheticSrDenoiser",
    "TextureBank",
    "adain",
    "afs_refine",
    "band_error_profile",
    "channel_stats",
    "combined_quality",
    "degrade",
    "expected_denoiser_calls",
    "gaussian_split",
    "geometric_schedule",
    "gmm_posterior_mean",
    "highband_energy_fraction",
    "linear_weight",
    "lowfreq_reference",
    "mask_split",
    "perceptual_proxy",
    "psnr",
    "rapsd",
    "reverse_step",
    "run_beam",
    "run_bon",
    "run_fk_smc",
    "run_iafs",
    "run_kds",
    "run_strategy",
    "run_vanilla",
    "schedule_reward",
    "schedule_segment",
    "select_best",
    "similarity_weights",
    "ssim",
    "structural_proxy",
    "upsample",
]
