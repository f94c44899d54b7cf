"""Build script: compiles the optional Cython kernel extension.

The extension is a pure speedup; if the build fails for any reason the
package installs anyway and falls back to the numpy backend at import.
"""
import os

from setuptools import setup, Extension
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-python fallback on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - build-env dependent
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - build-env dependent
            print(f"warning: skipping {ext.name} ({exc})")


def extensions():
    if os.environ.get("RSSA_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover
        return []
    ext = Extension(
        "rssa.kernels._fast",
        ["src/rssa/kernels/_fast.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
