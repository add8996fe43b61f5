"""Build script.

The package is pure Python; the two convolution kernels in
``iwaheights._speedups`` are an optional compiled accelerator.  If Cython
(or a C compiler) is unavailable, or IWAHEIGHTS_PURE=1 is set, the build
skips the extension and the package transparently falls back to the pure
implementations in ``iwaheights._kernels_py``.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("IWAHEIGHTS_PURE") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("iwaheights._speedups", ["src/iwaheights/_speedups.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
