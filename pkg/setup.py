"""Build the optional compiled core; the package works without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SUBCRIT_PA_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "subcrit_pa._core",
                    ["src/subcrit_pa/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O2"],
                    language="c++",
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
