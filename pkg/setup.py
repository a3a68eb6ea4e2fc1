"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile only costs speed, never correctness.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ctkit._speedups",
                ["src/ctkit/_speedups.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"ctkit: skipping compiled kernel ({exc}); pure-Python fallback will be used\n")

setup(ext_modules=ext_modules, zip_safe=False)
