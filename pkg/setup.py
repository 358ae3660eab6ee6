from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optimization, not a requirement: without
# Cython the package falls back to the vectorized numpy kernels at import.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "generank._spmv_cy",
                ["src/generank/_spmv_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )

setup(ext_modules=extensions)
