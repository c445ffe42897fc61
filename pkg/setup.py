import os

from setuptools import Extension, setup


def extensions():
    # HAPTICAD_NO_EXT=1 skips the compiled core; the package then runs on numpy alone.
    if os.environ.get("HAPTICAD_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "hapticad._kernels",
        ["src/hapticad/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
