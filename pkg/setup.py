from setuptools import setup

# The DPLL kernel has an optional compiled version. Build it when Cython is
# around; fall back to the pure-Python kernel otherwise (boolcore picks
# whichever imports).
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "stlogic.boolcore._speedups",
                ["src/stlogic/boolcore/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
