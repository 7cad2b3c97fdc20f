"""Build script for the optional compiled sweep kernels.

The package works without the extension; ``shadow_cover.kernels`` falls back
to the pure-Python implementation when ``_sweeps`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SHADOW_COVER_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "shadow_cover._sweeps",
                    sources=["src/shadow_cover/_sweeps.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
