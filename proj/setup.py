import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

eigen_candidates = [
    os.environ.get("EIGEN3_INCLUDE_DIR", ""),
    "/usr/include/eigen3",
    "/usr/local/include/eigen3",
]
eigen_include = next(
    (p for p in eigen_candidates if p and os.path.isdir(p)), "/usr/include/eigen3"
)

ext = Pybind11Extension(
    "factorcount._core",
    sources=["bindings/module.cpp"] + sorted(glob.glob("src/*.cpp")),
    include_dirs=["include", eigen_include],
    cxx_std=20,
    extra_compile_args=["-O3"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
