import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bmolab._core._quadcore",
                ["src/bmolab/_core/_quadcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # pure-python fallback is selected at import time
    ext_modules = []

setup(ext_modules=ext_modules)
