"""Build script: compiles the optional string-kernel extension.

Set TABKG_NO_EXT=1 to skip the extension entirely; the package then runs
on the pure-Python kernel fallback.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TABKG_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/tabkg/_ckernels.pyx"],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
