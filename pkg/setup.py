import sys

from setuptools import Extension, setup

# The compiled SMO core is optional: if Cython or a C compiler is missing the
# package installs anyway and lithosvm.solver falls back to the numpy loop.
ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lithosvm._smo",
                ["src/lithosvm/_smo.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover
    print(f"lithosvm: building without compiled SMO core ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
