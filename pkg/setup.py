import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ROTFRIC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        pass
    else:
        ext_modules = cythonize(
            [Extension("rotfric.greens._ckernels",
                       ["src/rotfric/greens/_ckernels.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3)

setup(ext_modules=ext_modules)
