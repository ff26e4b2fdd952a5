"""Pick the compiled kernels when available, else the numpy fallback.

Set ``GIGCONTRACT_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("GIGCONTRACT_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        kernels = _compiled


def get(name=None):
    """Return the kernel module for ``name`` ('cython' or 'python'), default the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
