from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bayes_screen._sweep",
                ["src/bayes_screen/_sweep.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython available: the package still works via the pure-Python kernel.
    ext_modules = []

setup(ext_modules=ext_modules)
