"""Kernel backend selection.

SUPERGRASS_BACKEND=numpy forces the pure-numpy path; SUPERGRASS_BACKEND=numba
requires numba. By default the numba kernels are used when importable.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SUPERGRASS_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"SUPERGRASS_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _kernels_np as kernels

    BACKEND = "numpy"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_np as kernels

        BACKEND = "numpy"
