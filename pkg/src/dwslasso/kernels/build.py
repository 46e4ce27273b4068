"""In-place build of the compiled kernels: ``python -m dwslasso.kernels.build``.

Compiles ``_ckernels.pyx`` and drops the resulting extension next to this
file, where the backend selector picks it up on the next import.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path


def main() -> int:
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
        from setuptools.command.build_ext import build_ext
        from setuptools.dist import Distribution
    except ImportError as exc:
        print(f"cannot build compiled kernels: {exc}", file=sys.stderr)
        return 1

    here = Path(__file__).resolve().parent
    pyx = here / "_ckernels.pyx"
    if not pyx.exists():
        print(f"source not found: {pyx}", file=sys.stderr)
        return 1

    ext = Extension(
        "dwslasso.kernels._ckernels",
        [str(pyx)],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    with tempfile.TemporaryDirectory() as tmp:
        dist = Distribution({
            "ext_modules": cythonize(
                [ext], compiler_directives={"language_level": "3"}, quiet=True
            )
        })
        cmd = build_ext(dist)
        cmd.build_lib = tmp
        cmd.build_temp = str(Path(tmp) / "tmp")
        cmd.ensure_finalized()
        cmd.run()
        built = list(Path(tmp).glob("dwslasso/kernels/_ckernels*"))
        if not built:
            print("build produced no extension artifact", file=sys.stderr)
            return 1
        for artifact in built:
            # rename over any loaded copy instead of truncating its inode
            staging = here / (artifact.name + ".new")
            shutil.copy2(artifact, staging)
            staging.replace(here / artifact.name)
            print(f"installed {artifact.name} -> {here}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
