"""Build script for the compiled collision-kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); building it is strongly recommended for large grids.
"""
import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "wavekin._kernels.collision_cy",
        ["src/wavekin/_kernels/collision_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
