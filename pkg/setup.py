from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the numpy
# implementation in tracecloak.kernels._pure when the extension is missing.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tracecloak.kernels._speedups",
                ["src/tracecloak/kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
