"""Sampling strategies: vanilla ancestral plus five reward-guided variants.

All strategies share one noise discipline: the latent created at level t
for candidate k in outer iteration i is drawn from Rng(seed).stream(i, t, k).
Initial pools use t = T, branching for the next level uses t - 1, and beam
search flattens its candidate grid to k = beam_index * branch + offset.
Because streams are keyed by labels rather than draw order, degenerate
configurations of different strategies perform bit-identical sampling
paths (iafs with one particle and one iteration, best-of-n with one
sample, and width-1 beam search all collapse to the vanilla sampler).

Denoiser call budgets per full run of n outer iterations over T steps:

    vanilla  n * T
    iafs     n * particles * T
    bon      n * particles * T
    beam     n * beams * branch * T
    fk-smc   n * particles * T
    kds      n * particles * T

Outer iterations past the first replace the reward's reference with the
previous iteration's decoded output (the pseudo ground truth), which is
what lets structural rewards run without the true target.
"""

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .diffusion import NoiseSchedule, reverse_step
from .errors import ConfigError, NumericalError
from .rewards import RewardSchedule, schedule_reward, schedule_segment
from .steering import AfsConfig, ParticlePool, afs_refine, select_best
from .tensor import Rng

log = logging.getLogger(__name__)

STRATEGY_KINDS = ("vanilla", "iafs", "bon", "beam", "fk-smc", "kds")

# Auxiliary stream label for resampling draws, outside the candidate range.
_FK_RESAMPLE_TAG = 1 << 40


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "iafs"
    particles: int = 10
    iterations: int = 3
    beams: int = 5
    branch: int = 2
    fk_temperature: float = 1.0
    kds_step: float = 0.5
    kds_bandwidth: float = None  # None -> per-step median pairwise distance
    afs: AfsConfig = field(default_factory=AfsConfig)
    schedule: RewardSchedule = field(default_factory=RewardSchedule)
    save_latents: bool = False

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy kind {self.kind!r}, expected one of {STRATEGY_KINDS}")
        if self.particles < 1 or self.iterations < 1 or self.beams < 1 or self.branch < 1:
            raise ConfigError("particles, iterations, beams and branch must all be >= 1")
        if self.fk_temperature <= 0:
            raise ConfigError("fk_temperature must be positive")
        if not 0.0 < self.kds_step <= 1.0:
            raise ConfigError("kds_step must lie in (0, 1]")
        if self.kds_bandwidth is not None and self.kds_bandwidth <= 0:
            raise ConfigError("kds_bandwidth must be positive when given")


def expected_denoiser_calls(config: StrategyConfig, timesteps: int) -> int:
    n, t = config.iterations, timesteps
    if config.kind == "vanilla":
        return n * t
    if config.kind == "beam":
        return n * config.beams * config.branch * t
    return n * config.particles * t


@dataclass
class TraceRow:
    iteration: int
    timestep: int
    chosen: int
    reward: float  # None when the strategy does not score this step
    segment: str
    wall_ms: float
    topk: list = field(default_factory=list)
    topk_weights: list = field(default_factory=list)
    adain_dmean: float = None
    adain_dstd: float = None


@dataclass
class RunRecord:
    strategy: str
    seed: int
    iterations: int
    timesteps: int
    denoiser_calls: int
    wall_time_s: float
    final: np.ndarray
    iteration_finals: list  # decoded output after each outer iteration
    trace: list
    latents: dict = None  # (iteration, timestep) -> refined latent, opt-in
    metrics: dict = field(default_factory=dict)
    config_hash: str = ""


class _CountingDenoiser:
    def __init__(self, denoiser):
        self._inner = denoiser
        self.calls = 0

    @property
    def shape(self):
        return self._inner.shape

    def denoise(self, x_t, t):
        self.calls += 1
        return self._inner.denoise(x_t, t)


def _init_particles(rng: Rng, iteration: int, schedule: NoiseSchedule, count: int, shape):
    sigma = schedule.sigma_cum[schedule.timesteps]
    return [sigma * rng.stream(iteration, schedule.timesteps, k).normal(shape) for k in range(count)]


def run_vanilla(config, denoiser, schedule, seed):
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    for i in range(1, config.iterations + 1):
        x = _init_particles(rng, i, schedule, 1, den.shape)[0]
        for t in range(schedule.timesteps, 0, -1):
            step_start = time.perf_counter()
            mu, _ = den.denoise(x, t)
            x = reverse_step(mu, schedule.sigma_step[t], rng.stream(i, t - 1, 0))
            trace.append(
                TraceRow(i, t, 0, None, schedule_segment(config.schedule, i, t),
                         1e3 * (time.perf_counter() - step_start))
            )
        finals.append(x)
    return RunRecord("vanilla", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace)


def run_iafs(config, denoiser, schedule, seed):
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    latents = {} if config.save_latents else None
    pseudo_gt = None
    n_particles = config.particles
    for i in range(1, config.iterations + 1):
        pool_latents = _init_particles(rng, i, schedule, n_particles, den.shape)
        survivor = None
        for t in range(schedule.timesteps, 0, -1):
            step_start = time.perf_counter()
            outs = [den.denoise(x, t) for x in pool_latents]
            cleans = [o[1] for o in outs]
            rewards = [schedule_reward(config.schedule, i, t, u, pseudo_gt) for u in cleans]
            pool = ParticlePool(pool_latents, cleans, rewards)
            k_star = select_best(pool)
            info = {}
            refined = afs_refine(pool, k_star, config.afs, trace=info)
            if refined is pool_latents[k_star]:
                # Identity path: the transition mean is exactly the one the
                # denoiser already produced for the winner.
                mu_star = outs[k_star][0]
            else:
                c = schedule.blend[t]
                mu_star = c * refined + (1.0 - c) * cleans[k_star]
            if latents is not None:
                latents[(i, t)] = refined
            sigma = schedule.sigma_step[t]
            pool_latents = [reverse_step(mu_star, sigma, rng.stream(i, t - 1, k)) for k in range(n_particles)]
            survivor = pool_latents[k_star]
            trace.append(
                TraceRow(i, t, k_star, rewards[k_star], schedule_segment(config.schedule, i, t),
                         1e3 * (time.perf_counter() - step_start),
                         info.get("topk", []), info.get("topk_weights", []),
                         info.get("adain_dmean"), info.get("adain_dstd"))
            )
        finals.append(survivor)
        pseudo_gt = survivor
    return RunRecord("iafs", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace, latents=latents)


def run_bon(config, denoiser, schedule, seed):
    """Best-of-n: independent chains, judged once on their final outputs."""
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    pseudo_gt = None
    for i in range(1, config.iterations + 1):
        best = None
        for k in range(config.particles):
            step_start = time.perf_counter()
            x = schedule.sigma_cum[schedule.timesteps] * rng.stream(i, schedule.timesteps, k).normal(den.shape)
            for t in range(schedule.timesteps, 0, -1):
                mu, _ = den.denoise(x, t)
                x = reverse_step(mu, schedule.sigma_step[t], rng.stream(i, t - 1, k))
            r = schedule_reward(config.schedule, i, 1, x, pseudo_gt)
            trace.append(
                TraceRow(i, 1, k, r, schedule_segment(config.schedule, i, 1),
                         1e3 * (time.perf_counter() - step_start))
            )
            if best is None or r > best[0]:
                best = (r, x)
        finals.append(best[1])
        pseudo_gt = best[1]
    return RunRecord("bon", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace)


def run_beam(config, denoiser, schedule, seed):
    """Beam search: keep the top `beams` candidates, expand each `branch` ways."""
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    pseudo_gt = None
    width = config.beams * config.branch
    for i in range(1, config.iterations + 1):
        candidates = _init_particles(rng, i, schedule, width, den.shape)
        final = None
        for t in range(schedule.timesteps, 0, -1):
            step_start = time.perf_counter()
            outs = [den.denoise(x, t) for x in candidates]
            rewards = np.array(
                [schedule_reward(config.schedule, i, t, mu_x0[1], pseudo_gt) for mu_x0 in outs]
            )
            keep = np.argsort(-rewards, kind="stable")[: config.beams]
            trace.append(
                TraceRow(i, t, int(keep[0]), float(rewards[keep[0]]),
                         schedule_segment(config.schedule, i, t),
                         1e3 * (time.perf_counter() - step_start))
            )
            if t > 1:
                candidates = [
                    reverse_step(outs[idx][0], schedule.sigma_step[t],
                                 rng.stream(i, t - 1, b * config.branch + j))
                    for b, idx in enumerate(keep)
                    for j in range(config.branch)
                ]
            else:
                final = reverse_step(outs[keep[0]][0], schedule.sigma_step[t], rng.stream(i, 0, 0))
        finals.append(final)
        pseudo_gt = final
    return RunRecord("beam", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace)


def run_fk_smc(config, denoiser, schedule, seed):
    """Feynman-Kac particle system with multinomial resampling at low ESS.

    Log weights accumulate reward / temperature each step; when the
    effective sample size drops below half the pool, particles are
    resampled and weights reset. The final output is the best-rewarded
    particle at the last step, not a weighted mixture.
    """
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    pseudo_gt = None
    n_particles = config.particles
    for i in range(1, config.iterations + 1):
        xs = _init_particles(rng, i, schedule, n_particles, den.shape)
        log_w = np.zeros(n_particles)
        final = None
        for t in range(schedule.timesteps, 0, -1):
            step_start = time.perf_counter()
            outs = [den.denoise(x, t) for x in xs]
            rewards = np.array(
                [schedule_reward(config.schedule, i, t, mu_x0[1], pseudo_gt) for mu_x0 in outs]
            )
            log_w = log_w + rewards / config.fk_temperature
            shifted = log_w - log_w.max()
            w = np.exp(shifted)
            total = w.sum()
            if not np.isfinite(total) or total <= 0.0:
                log.warning("degenerate feynman-kac weights at t=%d; falling back to uniform", t)
                w = np.full(n_particles, 1.0 / n_particles)
            else:
                w = w / total
            ess = 1.0 / float(np.sum(w * w))
            k_best = int(np.argmax(rewards))
            trace.append(
                TraceRow(i, t, k_best, float(rewards[k_best]),
                         schedule_segment(config.schedule, i, t),
                         1e3 * (time.perf_counter() - step_start))
            )
            if t == 1:
                final = reverse_step(outs[k_best][0], schedule.sigma_step[t], rng.stream(i, 0, k_best))
                break
            if ess < n_particles / 2.0:
                ancestors = rng.stream(i, t, _FK_RESAMPLE_TAG).integers_weighted(w, n_particles)
                outs = [outs[a] for a in ancestors]
                log_w = np.zeros(n_particles)
            xs = [
                reverse_step(outs[k][0], schedule.sigma_step[t], rng.stream(i, t - 1, k))
                for k in range(n_particles)
            ]
        finals.append(final)
        pseudo_gt = final
    return RunRecord("fk-smc", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace)


def _median_pairwise_distance(particles):
    dists = []
    for a in range(len(particles)):
        for b in range(a + 1, len(particles)):
            d = particles[a] - particles[b]
            dists.append(float(np.sqrt(np.sum(d * d))))
    positive = [d for d in dists if d > 0.0]
    return float(np.median(positive)) if positive else 0.0


def kernel_shift(particles, step: float, bandwidth: float = None):
    """One mean-shift move of every particle toward the kernel-weighted pool mean.

    Gaussian kernel on pairwise L2 distance; bandwidth defaults to the
    median positive pairwise distance (no move if the pool has collapsed).
    Returns (moved_particles, densities) where densities are the kernel
    sums used for mode selection.
    """
    n = len(particles)
    if bandwidth is None:
        bandwidth = _median_pairwise_distance(particles)
    flat = np.stack([p.ravel() for p in particles])
    sq = np.sum((flat[:, None, :] - flat[None, :, :]) ** 2, axis=-1)
    if bandwidth <= 0.0 or not np.isfinite(bandwidth):
        return [p.copy() for p in particles], np.full(n, float(n))
    kernel = np.exp(-sq / (2.0 * bandwidth * bandwidth))
    density = kernel.sum(axis=0)
    moved = []
    for k in range(n):
        target = np.einsum("j,jd->d", kernel[:, k] / kernel[:, k].sum(), flat).reshape(particles[k].shape)
        moved.append(particles[k] + step * (target - particles[k]))
    return moved, density


def run_kds(config, denoiser, schedule, seed):
    """Kernel density steering: rewards are never evaluated; particles drift
    toward the pool's density modes after every ancestral step and the
    densest final particle is returned."""
    rng = Rng(seed)
    den = _CountingDenoiser(denoiser)
    t_start = time.perf_counter()
    trace, finals = [], []
    n_particles = config.particles
    for i in range(1, config.iterations + 1):
        xs = _init_particles(rng, i, schedule, n_particles, den.shape)
        final = None
        for t in range(schedule.timesteps, 0, -1):
            step_start = time.perf_counter()
            outs = [den.denoise(x, t) for x in xs]
            drawn = [
                reverse_step(outs[k][0], schedule.sigma_step[t], rng.stream(i, t - 1, k))
                for k in range(n_particles)
            ]
            xs, density = kernel_shift(drawn, config.kds_step, config.kds_bandwidth)
            k_mode = int(np.argmax(density))
            trace.append(
                TraceRow(i, t, k_mode, None, schedule_segment(config.schedule, i, t),
                         1e3 * (time.perf_counter() - step_start))
            )
            if t == 1:
                final = xs[k_mode]
        finals.append(final)
    return RunRecord("kds", seed, config.iterations, schedule.timesteps, den.calls,
                     time.perf_counter() - t_start, finals[-1], finals, trace)


_RUNNERS = {
    "vanilla": run_vanilla,
    "iafs": run_iafs,
    "bon": run_bon,
    "beam": run_beam,
    "fk-smc": run_fk_smc,
    "kds": run_kds,
}


def run_strategy(config: StrategyConfig, denoiser, schedule: NoiseSchedule, seed: int) -> RunRecord:
    """Run one strategy end to end and verify its denoiser call budget."""
    if config.schedule.timesteps != schedule.timesteps:
        config = replace(config, schedule=replace(config.schedule, timesteps=schedule.timesteps))
    record = _RUNNERS[config.kind](config, denoiser, schedule, seed)
    expected = expected_denoiser_calls(config, schedule.timesteps)
    if record.denoiser_calls != expected:
        raise NumericalError(
            f"{config.kind} used {record.denoiser_calls} denoiser calls, expected {expected}"
        )
    return record
