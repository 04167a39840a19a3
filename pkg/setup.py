"""Build script: compiles the optional cone-projection extension.

The package works without the extension (pure-numpy fallback); a failed
compile is downgraded to a warning so `pip install` never hard-fails on
exotic toolchains.
"""

import warnings

import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "homroi._kernels.conekern",
                ["src/homroi/_kernels/conekern.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - toolchain-dependent
    warnings.warn(f"skipping compiled kernel ({exc}); pure-python lane will be used")
    extensions = []

setup(ext_modules=extensions)
