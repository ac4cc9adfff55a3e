"""Synthetic paired dataset: smooth scenes with band-limited detail.

Each item is a high-resolution tensor (smooth random base plus a small
band-pass texture) and its degraded low-resolution counterpart. Items are
stored as raw tensor files next to a plain-text manifest.
"""

import os

import numpy as np

from .diffusion import DegradationOperator, degrade
from .errors import MissingInputError
from .spectral import gaussian_kernel1d
from .tensor import Rng
from ._kernels import blur2d
from .tensorfile import read_tensor, write_png, write_tensor

_BASE_TAG = 0x0BA5_E001
_TEXTURE_TAG = 0x7E47_0002

MANIFEST_NAME = "manifest.txt"


def _bandpass(x, sigma_lo=1.0, sigma_hi=3.0, kernel=9):
    lo = blur2d(x, gaussian_kernel1d(kernel, sigma_lo))
    hi = blur2d(x, gaussian_kernel1d(kernel, sigma_hi))
    return lo - hi


def synthesize_hr(seed: int, size: int = 64, channels: int = 3, texture_rms: float = 0.06):
    """Deterministic high-resolution scene in [0, 1].

    A heavily blurred normal field rescaled into mid-gray range carries the
    low-frequency structure; band-pass noise at unit RMS scaled down adds
    the recoverable detail band.
    """
    rng = Rng(seed)
    base = rng.stream(_BASE_TAG).normal((channels, size, size))
    smooth_kernel = gaussian_kernel1d(min(2 * (size // 4) + 1, 31), size / 8.0)
    base = blur2d(base, smooth_kernel)
    lo, hi = base.min(), base.max()
    span = hi - lo
    if span == 0.0:
        base = np.full_like(base, 0.5)
    else:
        base = 0.25 + 0.5 * (base - lo) / span
    texture = _bandpass(rng.stream(_TEXTURE_TAG).normal((channels, size, size)))
    rms = float(np.sqrt(np.mean(texture * texture)))
    if rms > 0.0:
        texture = texture * (texture_rms / rms)
    return np.clip(base + texture, 0.0, 1.0)


def item_names(index: int):
    return f"hr_{index:03d}.rt", f"lr_{index:03d}.rt"


def generate_dataset(root, count=8, size=64, channels=3, factor=4, noise_std=0.0, seed=0):
    """Write `count` paired items plus a manifest under `root`."""
    os.makedirs(root, exist_ok=True)
    rows = []
    for idx in range(count):
        hr = synthesize_hr(seed * 10_000 + idx, size, channels)
        op = DegradationOperator(factor=factor, noise_std=noise_std, noise_seed=seed * 10_000 + idx)
        lr = degrade(hr, op)
        hr_name, lr_name = item_names(idx)
        write_tensor(os.path.join(root, hr_name), hr)
        write_tensor(os.path.join(root, lr_name), lr)
        write_png(os.path.join(root, hr_name.replace(".rt", ".png")), hr)
        write_png(os.path.join(root, lr_name.replace(".rt", ".png")), lr)
        rows.append((idx, hr_name, lr_name))
    lines = [
        f"count {count}",
        f"size {size}",
        f"channels {channels}",
        f"factor {factor}",
        f"noise_std {noise_std!r}",
        f"seed {seed}",
    ]
    lines += [f"item {idx:03d} {hr} {lr}" for idx, hr, lr in rows]
    lines.append("end")
    with open(os.path.join(root, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return rows


def load_manifest(root):
    """Parse the manifest into (meta dict, item list). Raises
    MissingInputError for a missing, truncated or malformed manifest."""
    path = os.path.join(root, MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [line.strip() for line in fh if line.strip()]
    except FileNotFoundError:
        raise MissingInputError(f"manifest not found: {path}") from None
    if not lines or lines[-1] != "end":
        raise MissingInputError(f"manifest truncated or malformed: {path}")
    meta, items = {}, []
    try:
        for line in lines[:-1]:
            parts = line.split()
            if parts[0] == "item":
                items.append((int(parts[1]), parts[2], parts[3]))
            else:
                key, value = parts
                meta[key] = value
        meta = {
            "count": int(meta["count"]),
            "size": int(meta["size"]),
            "channels": int(meta["channels"]),
            "factor": int(meta["factor"]),
            "noise_std": float(meta["noise_std"]),
            "seed": int(meta["seed"]),
        }
    except (KeyError, IndexError, ValueError):
        raise MissingInputError(f"manifest truncated or malformed: {path}") from None
    if len(items) != meta["count"]:
        raise MissingInputError(
            f"manifest lists {len(items)} items but declares count {meta['count']}"
        )
    return meta, items


def load_item(root, item):
    _, hr_name, lr_name = item
    hr = read_tensor(os.path.join(root, hr_name))
    lr = read_tensor(os.path.join(root, lr_name))
    return hr, lr
