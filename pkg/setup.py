import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled stepper is optional at runtime: pairdrive.kernels falls back to
# the numpy reference implementation when the extension is absent.
extensions = [
    Extension(
        "pairdrive.kernels._core",
        ["src/pairdrive/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-march=native"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
