from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("sonfis._somcore", ["src/sonfis/_somcore.pyx"])],
        language_level=3,
    )
except ImportError:
    # No Cython at build time: the package falls back to the NumPy kernels.
    extensions = []

setup(ext_modules=extensions)
