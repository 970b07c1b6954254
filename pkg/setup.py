import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    # The compiled enumeration kernel is a speedup, not a requirement:
    # the package falls back to the pure-Python backend when it is absent.
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"skipping compiled extension ({exc}); "
                          "resetwalks will use the pure-Python enumeration backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"skipping {ext.name} ({exc})")


try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("resetwalks._enumcore", ["src/resetwalks/_enumcore.pyx"])],
        language_level=3,
    )
except ImportError:  # pragma: no cover
    ext_modules = []

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": optional_build_ext},
)
