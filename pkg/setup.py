"""Build script for the optional compiled kernels.

The package works without them: ``wfkit.kernels`` falls back to numpy when
``wfkit._kernels`` cannot be imported.  Set ``WFKIT_NO_EXT=1`` to skip the
extension build.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("WFKIT_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("wfkit._kernels", ["src/wfkit/_kernels.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            compiler_directives={"language_level": "3", "boundscheck": False,
                                 "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
