"""Build glue for the compiled buffer kernels.

The package is fully functional without the extension (a pure-Python
twin is selected at import time), so a missing Cython toolchain only
costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("zlink._speedups", ["src/zlink/_speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
