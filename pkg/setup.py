"""Build script. The compiled kernel is optional: if Cython or a C compiler is
unavailable the package installs anyway and falls back to the numpy kernels."""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "orlicz_lab._kernels._core",
                ["src/orlicz_lab/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
