"""Build script: compiles the simulation kernel to a C extension.

The kernel lives in src/fqsim/_kernel.py and is plain Python. At build time
the same source is copied to a generated tree and cythonized under the module
name fqsim._kernel_c, so both the interpreted and the compiled version ship
from a single source of truth. The extension is optional: if Cython or a C
compiler is missing, the build still succeeds and the package falls back to
the pure-Python kernel at import time (see fqsim/kernel.py).
"""

import os
import shutil

from setuptools import Extension, setup

HERE = os.path.abspath(os.path.dirname(__file__))
KERNEL_SRC = os.path.join(HERE, "src", "fqsim", "_kernel.py")
GEN_DIR = os.path.join(HERE, "build", "_cython_src", "fqsim")


def _extensions():
    if os.environ.get("FQSIM_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    os.makedirs(GEN_DIR, exist_ok=True)
    gen = os.path.join(GEN_DIR, "_kernel_c.py")
    shutil.copyfile(KERNEL_SRC, gen)
    return cythonize(
        [Extension("fqsim._kernel_c", [gen])],
        language_level=3,
        quiet=True,
    )


setup(ext_modules=_extensions())
