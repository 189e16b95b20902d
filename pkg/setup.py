"""Build script for the optional compiled kernels.

The Cython extension ``mtfa._ckernels`` is optional: if Cython or a C
compiler is unavailable the package installs without it and
``mtfa.kernels`` falls back to the pure-numpy implementations.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MTFA_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "mtfa._ckernels",
                    sources=["src/mtfa/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"mtfa: building without compiled kernels ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
