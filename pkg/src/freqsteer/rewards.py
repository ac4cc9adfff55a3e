"""Reward proxies and timestep-dependent reward schedules.

Two proxies stand in for the perceptual / structural reward pair:

* perceptual: high-band spectral energy fraction, in [0, 1], reference-free.
* structural: coarse-weighted multi-scale pyramid L2 distance to a
  reference (>= 0, zero iff identical, symmetric).

Rewards are always higher-is-better; the structural distance is negated
(and divided by the dataset-level scale) wherever it enters a reward.

Schedules. Iteration 1 never has a reference, so every schedule kind scores
perceptual-only there. For iterations > 1:

    lpips-only       r = -R_L at every t
    constant-hybrid  r = R_C - R_L at every t
    linear           r = a_t R_C - (1 - a_t) R_L, a_t = (T - t)/(T - 1)
    segmented        t > tau_lpips: r = -R_L        (structural phase)
                     tau_clipiqa < t <= tau_lpips: r = R_C - R_L
                     t <= tau_clipiqa: r = R_C      (perceptual phase)
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import blur2d
from .spectral import gaussian_kernel1d, highband_energy_fraction
from .tensor import require_image, require_same_shape

SCHEDULE_KINDS = ("lpips-only", "constant-hybrid", "linear", "segmented")

_PYRAMID_KERNEL = gaussian_kernel1d(5, 1.0)


def perceptual_proxy(x, cutoff: float = None) -> float:
    """Reference-free sharpness/detail score in [0, 1]."""
    return highband_energy_fraction(x, cutoff)


def structural_proxy(a, b, levels: int = 3, level_weights=(1.0, 2.0, 4.0)) -> float:
    """Multi-scale pyramid L2 distance over `levels` octaves.

    Each level past the first is an antialiased 2x decimation; per-level
    MSEs are combined with normalized weights favoring the coarse end, and
    the root is returned. A constant offset c therefore maps to exactly |c|.
    """
    a = require_image(a, "a")
    b = require_image(b, "b")
    require_same_shape(a, b)
    w = np.asarray(level_weights, dtype=np.float64)
    if w.shape[0] != levels or np.any(w <= 0):
        raise ValueError("need one positive weight per pyramid level")
    if min(a.shape[1:]) < 2 ** (levels - 1):
        raise ValueError(
            f"image {a.shape[1:]} too small for a {levels}-level pyramid")
    w = w / w.sum()
    total = 0.0
    for lev in range(levels):
        if lev > 0:
            a = blur2d(a, _PYRAMID_KERNEL)[:, ::2, ::2]
            b = blur2d(b, _PYRAMID_KERNEL)[:, ::2, ::2]
        d = a - b
        total += w[lev] * float(np.mean(d * d))
    return float(np.sqrt(total))


class PerceptualReward:
    """Reference-free reward wrapping the perceptual proxy."""

    requires_reference = False

    def __init__(self, cutoff: float = None):
        self.cutoff = cutoff

    def score(self, candidate, reference=None) -> float:
        return perceptual_proxy(candidate, self.cutoff)


class StructuralReward:
    """Reference-based reward: negated, scale-normalized pyramid distance."""

    requires_reference = True

    def __init__(self, scale: float = 0.5):
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.scale = scale

    def score(self, candidate, reference=None) -> float:
        if reference is None:
            raise ValueError("structural reward needs a reference")
        return -structural_proxy(candidate, reference) / self.scale


def linear_weight(t: int, timesteps: int) -> float:
    """Perceptual-term weight of the linear schedule: 0 at t = T, 1 at t = 1."""
    if timesteps < 2:
        return 1.0
    return (timesteps - t) / (timesteps - 1)


@dataclass(frozen=True)
class RewardSchedule:
    kind: str = "segmented"
    timesteps: int = 15
    tau_clipiqa: int = 4
    tau_lpips: int = 7
    structural_scale: float = 0.5
    cutoff: float = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}")
        if self.kind == "segmented" and not 0 <= self.tau_clipiqa <= self.tau_lpips <= self.timesteps:
            raise ValueError(
                f"need 0 <= tau_clipiqa <= tau_lpips <= T, got "
                f"({self.tau_clipiqa}, {self.tau_lpips}, T={self.timesteps})"
            )


def schedule_segment(schedule: RewardSchedule, iteration: int, t: int) -> str:
    """Label of the active reward case; one of perceptual | structural |
    hybrid | linear."""
    if iteration < 1:
        raise ValueError("iteration counts from 1")
    if not 1 <= t <= schedule.timesteps:
        raise ValueError(f"timestep {t} outside [1, {schedule.timesteps}]")
    if iteration == 1:
        return "perceptual"
    if schedule.kind == "lpips-only":
        return "structural"
    if schedule.kind == "constant-hybrid":
        return "hybrid"
    if schedule.kind == "linear":
        return "linear"
    if t > schedule.tau_lpips:
        return "structural"
    if t > schedule.tau_clipiqa:
        return "hybrid"
    return "perceptual"


def schedule_reward(schedule: RewardSchedule, iteration: int, t: int, x0_hat, pseudo_gt=None) -> float:
    """Score a clean prediction under the schedule's active case.

    pseudo_gt may be None during iteration 1 (it is never touched there);
    any later iteration raises if a reference-needing segment has none.
    """
    segment = schedule_segment(schedule, iteration, t)
    if segment == "perceptual":
        return perceptual_proxy(x0_hat, schedule.cutoff)
    if pseudo_gt is None:
        raise ValueError(f"segment {segment!r} at t={t} needs a pseudo ground truth")
    r_struct = structural_proxy(x0_hat, pseudo_gt) / schedule.structural_scale
    if segment == "structural":
        return -r_struct
    if segment == "hybrid":
        return perceptual_proxy(x0_hat, schedule.cutoff) - r_struct
    a = linear_weight(t, schedule.timesteps)
    return a * perceptual_proxy(x0_hat, schedule.cutoff) - (1.0 - a) * r_struct
