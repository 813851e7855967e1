"""Builds the optional compiled evaluator kernel.

The package is fully functional without it (a pure-Python engine is selected
at import time); the extension just makes sweeps considerably faster.
"""

import os

from setuptools import setup

_PYX = os.path.join("src", "etskit", "_engine.pyx")

try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    if os.path.exists(_PYX):
        extensions = cythonize(
            [Extension("etskit._engine", [_PYX])], language_level=3
        )
    else:
        extensions = []
except ImportError:
    extensions = []

setup(ext_modules=extensions)
