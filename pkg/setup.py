from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "shallowrange._ckernels",
                ["src/shallowrange/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level="3",
    )
except ImportError:
    # The package falls back to the pure-python kernels at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
