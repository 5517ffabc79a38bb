"""Build hook for the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs and
runs on the pure-Python kernels.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("GRAPHCODES_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "graphcodes._kernels",
                    ["src/graphcodes/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
