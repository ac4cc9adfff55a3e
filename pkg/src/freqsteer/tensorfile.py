"""Raw tensor file format and PNG previews.

Layout of a .rt file:
    bytes  0..15   magic + version, ASCII "FRQSTensorRaw001"
    bytes 16..27   three little-endian uint32: C, H, W
    bytes 28..     C*H*W little-endian float32, row-major (channel, row, col)

Values are stored float32; loading promotes to float64 (the in-memory
convention). PNG previews clamp to [0, 1], scale by 255 and quantize with
round-half-even; previews are for eyeballing only, every metric runs on the
float data.
"""

import numpy as np

from .errors import MissingInputError
from .tensor import require_image

MAGIC = b"FRQSTensorRaw001"
assert len(MAGIC) == 16


def write_tensor(path, x) -> None:
    x = require_image(x, "tensor")
    c, h, w = x.shape
    header = MAGIC + np.array([c, h, w], dtype="<u4").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(x, dtype="<f4").tobytes())


def read_tensor(path) -> np.ndarray:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except FileNotFoundError:
        raise MissingInputError(f"tensor file not found: {path}")
    if len(raw) < 28 or raw[:16] != MAGIC:
        raise MissingInputError(f"not a raw tensor file: {path}")
    c, h, w = np.frombuffer(raw[16:28], dtype="<u4")
    n = int(c) * int(h) * int(w)
    body = raw[28:]
    if len(body) != 4 * n:
        raise MissingInputError(
            f"truncated tensor file: {path} (expected {4 * n} payload bytes, got {len(body)})"
        )
    data = np.frombuffer(body, dtype="<f4").astype(np.float64)
    return data.reshape(int(c), int(h), int(w))


def to_png_bytes(x) -> bytes:
    from io import BytesIO

    from PIL import Image

    x = require_image(x, "tensor")
    q = np.clip(x, 0.0, 1.0) * 255.0
    q = np.rint(q).astype(np.uint8)  # np.rint rounds half to even
    if x.shape[0] == 1:
        img = Image.fromarray(q[0], mode="L")
    elif x.shape[0] == 3:
        img = Image.fromarray(np.moveaxis(q, 0, -1), mode="RGB")
    else:
        # previews for other channel counts: channel mean as grayscale
        m = np.clip(x.mean(axis=0, keepdims=True), 0.0, 1.0) * 255.0
        img = Image.fromarray(np.rint(m[0]).astype(np.uint8), mode="L")
    buf = BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_png(path, x) -> None:
    with open(path, "wb") as f:
        f.write(to_png_bytes(x))
