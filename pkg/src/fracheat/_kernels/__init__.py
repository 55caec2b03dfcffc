"""Hot kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it imports; otherwise the
numpy fallback ``_pykernels`` is used. Set ``FRACHEAT_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("FRACHEAT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

weighted_power_sum = _impl.weighted_power_sum
duhamel_trapezoid = _impl.duhamel_trapezoid
smooth_transition = _impl.smooth_transition

__all__ = ["BACKEND", "weighted_power_sum", "duhamel_trapezoid", "smooth_transition"]
