"""Builds the optional Cython core. Without Cython or a compiler the package
installs pure-Python and falls back to ``phiprime._core._pycore`` at import."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("phiprime._core._ccore", ["src/phiprime/_core/_ccore.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
