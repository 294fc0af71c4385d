"""Build script for the optional compiled level-set kernel.

The package is fully functional without the extension (a pure-Python
kernel with identical semantics is selected at import time); building it
just makes contour evolution much faster on large images. Set
LESIONKIT_NO_EXT=1 to skip the build explicitly.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("LESIONKIT_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "lesionkit._fastcv",
                    ["src/lesionkit/_fastcv.pyx"],
                    include_dirs=[numpy.get_include()],
                    # no -ffast-math: the compiled kernel must be
                    # bit-identical to the pure-Python fallback
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
