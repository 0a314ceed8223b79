import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "modchain._assembly_cy",
                ["src/modchain/_assembly_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ]
    )
except ImportError:
    # pure-python fallback kernel is selected at import time
    ext_modules = []

setup(ext_modules=ext_modules)
