"""Build script: compiles the Monte Carlo trial kernels when Cython is available.

The package works without the extension (a pure-Python kernel module is
selected at import time), so a failed or skipped compile is not fatal.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/dibc/_kernels.pyx"],
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
