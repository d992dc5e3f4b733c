"""Kernel selection: the compiled extension when built, pure Python otherwise.

Set ``LAL_PURE_PYTHON=1`` to force the fallback.
"""

import os
from types import ModuleType

from . import _kernel_py


def load_backend(name: str) -> ModuleType:
    if name == "python":
        return _kernel_py
    if name == "cython":
        from . import _kernel  # type: ignore[attr-defined]
        return _kernel
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.append("cython")
    return names


if os.environ.get("LAL_PURE_PYTHON"):
    impl = _kernel_py
else:
    try:
        impl = load_backend("cython")
    except ImportError:
        impl = _kernel_py

BACKEND = "python" if impl is _kernel_py else "cython"
run = impl.run
