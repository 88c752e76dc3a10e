"""Build script for the optional compiled edit-distance kernels.

The extension is a pure speedup: if Cython or a C compiler is missing the
build degrades to the pure-Python kernels and the package stays fully
functional (entfix.kernels selects the backend at import time).
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"skipping compiled kernels ({exc}); "
                          "falling back to pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name} ({exc}); "
                          "falling back to pure-Python backend")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("entfix._ckernels", ["src/entfix/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
