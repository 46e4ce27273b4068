"""Build hooks for the optional compiled kernels.

The package is pure Python. The Cython extension under ``dwslasso.kernels``
is a drop-in speedup: when Cython or a C compiler is missing, the build
degrades silently and the numpy backend is selected at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a missing toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"warning: compiled kernels not built ({exc}); "
              "the numpy backend will be used")


def _extensions():
    if os.environ.get("DWSLASSO_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "dwslasso.kernels._ckernels",
        ["src/dwslasso/kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"},
                     quiet=True)


setup(cmdclass={"build_ext": OptionalBuildExt}, ext_modules=_extensions())
