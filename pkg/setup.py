"""Build script for the optional compiled kernel backend.

The package is fully functional without the extension; leocell._backend
falls back to the pure Python kernels when the import fails.
"""
from setuptools import Extension, setup

# -ffp-contract=off: no fused multiply-add, so the compiled kernels produce
# bit-identical results to the pure Python backend. Do not add -ffast-math.
ext = Extension(
    "leocell._backend._fast",
    sources=["src/leocell/_backend/_fast.pyx"],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)
ext.optional = True

try:
    from Cython.Build import cythonize

    extensions = cythonize([ext], language_level="3")
except ImportError:
    extensions = []

setup(ext_modules=extensions)
