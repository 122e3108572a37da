import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython or a compiler the package
# falls back to the numpy implementation at import time.
ext_modules = []
if os.environ.get("SECANT_DYN_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "secant_dyn._kernels",
                    ["src/secant_dyn/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no FMA contraction: results must match the numpy back end bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
