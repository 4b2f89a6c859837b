import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compensated arithmetic in the kernels relies on
# IEEE rounding of every intermediate; fused multiply-adds would change
# results between compilers and break bit-reproducibility.
extensions = [
    Extension(
        "ulamsig._kernels",
        ["src/ulamsig/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
