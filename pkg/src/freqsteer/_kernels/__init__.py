"""Hot-kernel backend selection.

The compiled core (_fastcore, Cython) is preferred when importable; the
NumPy backend is the fallback and the reference implementation. Set
FREQSTEER_KERNELS=python or FREQSTEER_KERNELS=compiled to force a backend
(forcing "compiled" raises if the extension is missing).
"""

import os

from . import numpy_backend

_choice = os.environ.get("FREQSTEER_KERNELS", "auto").lower()

if _choice not in ("auto", "python", "compiled"):
    raise RuntimeError(f"FREQSTEER_KERNELS must be auto|python|compiled, got {_choice!r}")

if _choice == "python":
    _impl = numpy_backend
    BACKEND = "python"
else:
    try:
        from . import _fastcore as _impl

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = numpy_backend
        BACKEND = "python"

blur2d = _impl.blur2d
radial_power = _impl.radial_power
dot_widened = _impl.dot_widened
sumsq_widened = _impl.sumsq_widened

__all__ = ["BACKEND", "blur2d", "radial_power", "dot_widened", "sumsq_widened", "numpy_backend"]
