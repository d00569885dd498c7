import numpy
from Cython.Build import cythonize
from setuptools import Extension, find_packages, setup

extensions = [
    Extension(
        "vulnlife._kernels._core",
        ["src/vulnlife/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# Metadata lives in pyproject.toml; the fields repeated here keep legacy
# setuptools toolchains (which ignore [project]) able to build the extension
# in place under src/.
setup(
    name="vulnlife",
    version="0.1.0",
    package_dir={"": "src"},
    packages=find_packages("src"),
    ext_modules=cythonize(extensions, language_level=3),
    install_requires=["numpy>=1.25", "scipy>=1.11"],
    entry_points={"console_scripts": ["vulnlife = vulnlife.cli:main"]},
)
