"""Build hook for the optional compiled kernels.

The package works without the extension: nbhd._backend falls back to the
pure Python twin when nbhd._kernels is missing or NBHD_PURE_PYTHON is set.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("nbhd._kernels", ["src/nbhd/_kernels.pyx"], optional=True)],
        language_level="3",
    )

setup(ext_modules=ext_modules)
