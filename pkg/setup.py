"""Build script: compiles the optional Cython kernels.

The package is fully functional without the extension; `spinmi.kernels`
falls back to the numpy implementations if the build is skipped or fails.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "spinmi._mckernels",
                ["src/spinmi/_mckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception:
    extensions = []

setup(ext_modules=extensions)
