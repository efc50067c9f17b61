import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# The extension compiles the full C++ core plus the binding layer, so the
# python package needs no separately built shared library.
sources = sorted(glob.glob("src/*.cpp")) + ["python/bindings.cpp"]

eigen_include = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext_modules = [
    Pybind11Extension(
        "annulus_bem._core",
        sources,
        include_dirs=["include", "vendor", eigen_include],
        cxx_std=20,
        extra_compile_args=["-pthread"],
        extra_link_args=["-pthread"],
    )
]

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": build_ext},
    packages=["annulus_bem"],
    package_dir={"annulus_bem": "python/annulus_bem"},
)
