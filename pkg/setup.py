"""Build script for the optional compiled kernels.

The package works without the extension: ``iamsim.kernels`` falls back to the
numpy implementation when ``iamsim._kernels`` is missing. Building requires
Cython, numpy headers, and a C compiler; if any of those are absent the
extension is skipped and installation proceeds.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "iamsim._kernels",
                ["src/iamsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
