"""Build script. Compiles the simulation kernel when Cython and a C compiler
are available; otherwise the package falls back to the pure-Python kernel at
import time. Set GREEDYBANDIT_PURE=1 to skip the extension entirely."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GREEDYBANDIT_PURE") != "1":
    try:
        import numpy
        import numpy.random
        from Cython.Build import cythonize
        from setuptools import Extension

        kernel = Extension(
            "greedybandit._kernel",
            sources=["src/greedybandit/_kernel.pyx"],
            include_dirs=[numpy.get_include()],
            library_dirs=[os.path.join(os.path.dirname(numpy.random.__file__), "lib")],
            libraries=["npyrandom"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize([kernel], language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
