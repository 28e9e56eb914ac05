"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
reference kernels are used otherwise.  Set ``SIRFIELD_FORCE_FALLBACK=1``
to insist on the numpy backend (useful for benchmarking and debugging).
Both backends satisfy identical contracts; results agree to rounding.
"""

import os

from . import _kernels as _numpy_kernels

_compiled = None
if os.environ.get("SIRFIELD_FORCE_FALLBACK", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _accel as _compiled
    except ImportError:
        _compiled = None

HAS_COMPILED = _compiled is not None
_active = _compiled if _compiled is not None else _numpy_kernels

correlate_valid = _active.correlate_valid
bilinear_many = _active.bilinear_many
makima_many = _active.makima_many


def which():
    """Name of the backend bound at import time."""
    return "compiled" if _active is not _numpy_kernels else "numpy"
