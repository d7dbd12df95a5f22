import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SCOPONE_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "scopone.kernels.ckernels",
                    ["src/scopone/kernels/ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install pure-Python only, the kernel
        # selector falls back to pykernels at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
