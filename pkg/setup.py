from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("ltcycles._kernels", ["src/ltcycles/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
