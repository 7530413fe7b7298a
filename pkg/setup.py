"""Build script: compiles the optional Cython kernel extension.

Set PSPRIMES_SKIP_EXT=1 to install without the compiled core; the package
falls back to the NumPy reference kernels at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PSPRIMES_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "psprimes._kernels._core",
                    ["src/psprimes/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
