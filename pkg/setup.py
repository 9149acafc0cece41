"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to a warning unless
BASKETDAE_REQUIRE_EXT=1 is set.  Set BASKETDAE_DISABLE_EXT=1 to skip the
extension build entirely.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that tolerates a missing or broken C toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._skip(exc)

    def _skip(self, exc):
        if os.environ.get("BASKETDAE_REQUIRE_EXT") == "1":
            raise
        warnings.warn(
            f"building the compiled kernels failed ({exc}); "
            "basketdae will fall back to the pure numpy backend"
        )


def extensions():
    if os.environ.get("BASKETDAE_DISABLE_EXT") == "1":
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        if os.environ.get("BASKETDAE_REQUIRE_EXT") == "1":
            raise
        warnings.warn(f"Cython/numpy unavailable ({exc}); skipping compiled kernels")
        return []
    ext = Extension(
        "basketdae.backends._fastcore",
        sources=["src/basketdae/backends/_fastcore.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
