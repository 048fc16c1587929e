"""Build the optional Cython Lloyd-iteration kernel.

The package works without the extension (a numpy fallback is selected at
import); the build is marked optional so environments without a C toolchain
still install cleanly.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "islandctl._lloyd_cy",
                sources=["src/islandctl/_lloyd_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
