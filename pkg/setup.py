from setuptools import setup, Extension

from Cython.Build import cythonize

extensions = [
    Extension(
        "tempofleet.control._kernels_c",
        ["src/tempofleet/control/_kernels_c.pyx"],
        extra_compile_args=["-O3"],
    ),
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    ),
)
