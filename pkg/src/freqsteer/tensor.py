"""Core tensor conventions and the deterministic RNG.

An image tensor is a rank-3 numpy float64 array laid out (channels, height,
width), row-major. Tensors are treated as immutable: operations return new
arrays and never write through their inputs. Rank-2 / rank-4 data is out of
scope by design; batching is explicit iteration at call sites.

Randomness is counter-based (Philox-4x64-10 via numpy's bit generator) with
explicit stream splitting: Rng(seed).stream(*labels) derives an independent
child stream from integer labels through a splitmix64 mixing chain, so e.g.
particle k's draws at timestep t are identical no matter how many other
particles exist. Standard normals are produced by an explicit Box-Muller
transform on 53-bit uniforms from the counter stream.
"""

import numpy as np

from ._kernels import dot_widened, sumsq_widened
from .errors import NumericalError

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def require_image(x, name: str = "tensor") -> np.ndarray:
    """Validate the (C, H, W) contract and return x as float64."""
    a = np.asarray(x)
    if a.ndim != 3:
        raise ValueError(f"{name} must be rank-3 (C, H, W), got rank {a.ndim}")
    if min(a.shape) < 1:
        raise ValueError(f"{name} has a zero-sized dimension: {a.shape}")
    if a.dtype != np.float64:
        a = a.astype(np.float64)
    return a


def require_finite(x, name: str = "tensor") -> np.ndarray:
    a = require_image(x, name)
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name} contains non-finite values")
    return a


def require_same_shape(a, b, what: str = "tensors"):
    if a.shape != b.shape:
        raise ValueError(f"{what} must share a shape: {a.shape} vs {b.shape}")


def dot(a, b) -> float:
    """Inner product over all entries, widened accumulation."""
    a = require_image(a, "a")
    b = require_image(b, "b")
    require_same_shape(a, b)
    return dot_widened(a, b)


def l2_norm(a) -> float:
    a = require_image(a, "a")
    return float(np.sqrt(sumsq_widened(a)))


class Rng:
    """Deterministic counter-based random source with splittable streams.

    A stream is addressed by the root seed plus a path of integer labels.
    Draw methods advance only this stream; child streams derived through
    stream() are independent of the parent's position.
    """

    def __init__(self, seed: int, _path: tuple = ()):
        if not 0 <= int(seed) <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        self.seed = int(seed)
        self.path = tuple(int(p) for p in _path)
        h = _splitmix64(self.seed)
        for label in self.path:
            h = _splitmix64(h ^ ((label * 0x9E3779B97F4A7C15) & _MASK64))
        key = np.array([self.seed, h], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def stream(self, *labels) -> "Rng":
        """Derive an independent child stream; the parent is not advanced."""
        return Rng(self.seed, self.path + tuple(labels))

    def uniform(self, shape=()) -> np.ndarray:
        """53-bit uniforms in [0, 1)."""
        return self._gen.random(size=shape, dtype=np.float64)

    def normal(self, shape=()) -> np.ndarray:
        """i.i.d. standard normals via Box-Muller on the counter stream.

        Draws ceil(n/2) uniform pairs; u1 is mapped to (0, 1] so the log is
        finite.
        """
        shape = tuple(int(s) for s in (shape if isinstance(shape, (tuple, list)) else (shape,)))
        n = 1
        for s in shape:
            n *= s
        pairs = (n + 1) // 2
        u1 = 1.0 - self._gen.random(size=pairs, dtype=np.float64)
        u2 = self._gen.random(size=pairs, dtype=np.float64)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return z.reshape(shape) if shape else float(z[0])

    def integers_weighted(self, weights, count: int) -> np.ndarray:
        """Multinomial index draws by inverse-CDF on stream uniforms."""
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0):
            raise ValueError("weights must be a non-empty 1D array of nonnegatives")
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            raise NumericalError("weights sum to zero or are non-finite")
        cdf = np.cumsum(w / total)
        cdf[-1] = 1.0  # guard round-off at the top end
        u = self._gen.random(size=count, dtype=np.float64)
        return np.searchsorted(cdf, u, side="right").astype(np.int64)


def sample_standard_normal(rng: Rng, shape) -> np.ndarray:
    """Standard-normal tensor of the given (C, H, W) shape."""
    if len(tuple(shape)) != 3:
        raise ValueError("shape must be (C, H, W)")
    return rng.normal(tuple(shape))
