"""Build script: compiles the Jacobi kernel when Cython and a C compiler are available."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ENTLAW_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "entlaw._jacobi_ext",
                    ["src/entlaw/_jacobi_ext.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
