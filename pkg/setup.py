"""Build script. The compiled kernel core is optional: if Cython or a C
compiler is unavailable the package installs anyway and falls back to the
NumPy kernel backend at import time."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "freqsteer._kernels._fastcore",
                sources=["src/freqsteer/_kernels/_fastcore.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except Exception as exc:  # pragma: no cover - environment dependent
    sys.stderr.write(f"freqsteer: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
