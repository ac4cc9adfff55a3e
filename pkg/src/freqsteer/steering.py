"""Adaptive frequency steering: particle selection and low-band fusion.

Per timestep the pool holds N candidate latents with their clean
predictions and rewards. The best-rewarded particle is selected; its
low-frequency band is then statistically aligned (AdaIN) to a reference
assembled from the low bands of its top-K most cosine-similar neighbors,
and recombined with its own untouched high band. Similarity is measured on
the latents themselves unless similarity_on_clean is set.

Degenerate paths return the chosen latent unchanged (same object): a
single-particle pool, steering disabled, or no neighbor with positive
similarity.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .spectral import adain, channel_stats, gaussian_split, mask_split
from .tensor import dot, l2_norm

log = logging.getLogger(__name__)


@dataclass
class ParticlePool:
    particles: list  # N latents (C, H, W)
    clean_predictions: list  # N predicted clean tensors
    rewards: list  # N floats

    def __post_init__(self):
        n = len(self.particles)
        if n < 1:
            raise ValueError("pool must hold at least one particle")
        if len(self.clean_predictions) != n or len(self.rewards) != n:
            raise ValueError("pool fields must have equal length")

    @property
    def size(self) -> int:
        return len(self.particles)


@dataclass(frozen=True)
class AfsConfig:
    enabled: bool = True
    top_k: int = 2
    split: str = "spatial"  # spatial (production) | dft (projector / theory)
    kernel: int = 9
    sigma: float = 1.0
    cutoff: float = None  # dft split radius; None -> min(H, W)/8
    similarity_on_clean: bool = False
    eps: float = 1e-6

    def __post_init__(self):
        if self.split not in ("spatial", "dft"):
            raise ValueError("split must be 'spatial' or 'dft'")
        if self.top_k < 0:
            raise ValueError("top_k must be nonnegative")

    def split_fn(self, x):
        if self.split == "spatial":
            return gaussian_split(x, self.kernel, self.sigma)
        return mask_split(x, self.cutoff)


def select_best(pool: ParticlePool) -> int:
    """Index of the highest reward; ties break to the lowest index."""
    return int(np.argmax(np.asarray(pool.rewards, dtype=np.float64)))


def similarity_weights(pool: ParticlePool, chosen_idx: int, use_clean: bool = False) -> np.ndarray:
    """Cosine similarity of every particle to the chosen one.

    The chosen particle's weight is 1 by definition. A zero-norm particle
    (or a zero-norm chosen) gets weight 0 rather than NaN.
    """
    tensors = pool.clean_predictions if use_clean else pool.particles
    ref = tensors[chosen_idx]
    ref_norm = l2_norm(ref)
    out = np.zeros(pool.size)
    out[chosen_idx] = 1.0
    if ref_norm == 0.0:
        log.warning("chosen particle has zero norm; all similarities set to 0")
        return out
    for i in range(pool.size):
        if i == chosen_idx:
            continue
        n = l2_norm(tensors[i])
        if n == 0.0:
            log.warning("zero-norm particle %d; similarity set to 0", i)
            continue
        out[i] = dot(tensors[i], ref) / (n * ref_norm)
    return out


def topk_neighbors(weights, chosen_idx: int, top_k: int):
    """Top-K neighbor indices by similarity, excluding the chosen particle
    and anything with nonpositive similarity. Returns (indices, weights)."""
    w = np.asarray(weights, dtype=np.float64)
    order = np.argsort(-w, kind="stable")
    picked = [int(i) for i in order if i != chosen_idx and w[i] > 0.0][: int(top_k)]
    return picked, w[picked]


def lowfreq_reference(pool: ParticlePool, weights, chosen_idx: int, top_k: int, split=None) -> np.ndarray:
    """Similarity-weighted average of the top-K neighbors' low bands.

    Falls back to the chosen particle's own low band when no neighbor
    qualifies (top_k == 0, all similarities <= 0, or a single-particle
    pool).
    """
    split = split or (lambda x: gaussian_split(x))
    idx, wts = topk_neighbors(weights, chosen_idx, top_k)
    if not idx:
        low, _ = split(pool.particles[chosen_idx])
        return low
    acc = None
    for i, w in zip(idx, wts):
        low, _ = split(pool.particles[i])
        acc = w * low if acc is None else acc + w * low
    return acc / wts.sum()


def afs_refine(pool: ParticlePool, chosen_idx: int, config: AfsConfig = AfsConfig(), trace: dict = None) -> np.ndarray:
    """Fuse the chosen particle's high band with its AdaIN-aligned low band.

    The low band is aligned to the per-channel statistics of the neighbor
    reference; the high band is passed through untouched. Populates `trace`
    (if given) with neighbor indices/weights and the AdaIN stat deltas.
    """
    chosen = pool.particles[chosen_idx]
    if trace is not None:
        trace.update({"topk": [], "topk_weights": [], "adain_dmean": None, "adain_dstd": None})
    if not config.enabled or pool.size == 1:
        return chosen
    weights = similarity_weights(pool, chosen_idx, use_clean=config.similarity_on_clean)
    idx, wts = topk_neighbors(weights, chosen_idx, config.top_k)
    if not idx:
        return chosen
    low, high = config.split_fn(chosen)
    ref = lowfreq_reference(pool, weights, chosen_idx, config.top_k, split=config.split_fn)
    ref_stats = channel_stats(ref)
    src_stats = channel_stats(low)
    adapted = adain(low, ref_stats, eps=config.eps)
    if trace is not None:
        trace["topk"] = idx
        trace["topk_weights"] = [float(v) for v in wts]
        trace["adain_dmean"] = float(np.mean(np.abs(ref_stats.mean - src_stats.mean)))
        trace["adain_dstd"] = float(np.mean(np.abs(ref_stats.std - src_stats.std)))
    return adapted + high
