"""Build script: compiles the optional Cython speedup core.

The package works without the extension (pure-Python kernels are used as a
fallback), so a failed compile only degrades performance.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("coinsel._core", ["src/coinsel/_core.pyx"])],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
