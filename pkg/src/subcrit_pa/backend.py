"""Select the sampling kernels at import time.

The compiled ``_core`` extension is used when it imports; otherwise the
pure-Python ``_core_py`` twin is used. Set ``SUBCRIT_PA_BACKEND=python`` to
force the fallback.
"""
import os

from . import _core_py

core = _core_py
if os.environ.get("SUBCRIT_PA_BACKEND", "").lower() != "python":
    try:
        from . import _core as core  # noqa: F811
    except ImportError:
        core = _core_py

BACKEND = core.NAME


def available():
    """Names of the importable backends, compiled first."""
    names = []
    try:
        from . import _core  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get(name):
    if name == "python":
        return _core_py
    if name == "cython":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
