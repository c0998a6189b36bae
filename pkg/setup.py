"""Build script for the optional compiled episode-loop extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "reminq._loops",
                ["src/reminq/_loops.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
