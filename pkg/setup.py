"""Build script for the optional compiled d-separation kernel.

The package is pure Python by default.  When Cython is available the hot
reachability kernel is compiled to a C extension; otherwise the build falls
back silently to the pure implementation selected at import time.

Set TELEO_NO_EXT=1 to skip the extension even when Cython is installed.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TELEO_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            ["src/teleo/_dsep_c.pyx"],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
