"""Build script: compiles the optional Cython fast core.

The compiled extension accelerates the two hot kernels (batched circuit
evaluation and decision-tree split scans).  If Cython or a C compiler is
unavailable, or UAVQAD_NO_EXT=1 is set, the package installs pure-Python
only and selects the NumPy kernel backend at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("UAVQAD_NO_EXT", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "uavqad.kernels._fastcore",
                    sources=["src/uavqad/kernels/_fastcore.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
