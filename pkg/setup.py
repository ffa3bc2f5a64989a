import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("EVACI_NO_EXT") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "evaci.kernels._fast",
                ["src/evaci/kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps the compiled loop arithmetic
                # comparable with the pure-python fallback (no FMA fusion).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
