"""Build shim: compiles the Rust extension with cargo and ships the cdylib.

The wheel machinery (maturin / setuptools-rust) is deliberately not a
dependency; plain setuptools plus a cargo invocation is enough for a local
editable install:

    pip install -e crates/py --no-build-isolation
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

HERE = Path(__file__).resolve().parent
WORKSPACE = HERE.parent.parent


class CargoExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "hdcsim-py"],
            check=True,
            cwd=WORKSPACE,
        )
        built = WORKSPACE / "target" / "release" / "libhdcsim_py.so"
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    packages=[],
    ext_modules=[CargoExtension("hdcsim_py")],
    cmdclass={"build_ext": CargoBuildExt},
)
