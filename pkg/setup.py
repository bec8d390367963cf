import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "sofim._kernels._fused",
        ["src/sofim/_kernels/_fused.pyx"],
        include_dirs=[np.get_include()],
    )
]

if cythonize is not None:
    ext_modules = cythonize(extensions, language_level=3)
else:
    # Without Cython the package installs pure-Python; sofim._kernels
    # falls back to the numpy backend at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
