import os
import sys

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("VOLINT_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("volint: Cython/numpy unavailable, installing pure-Python kernels", file=sys.stderr)
        return []
    ext = Extension(
        "volint._ckernels",
        ["src/volint/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=_extensions())
