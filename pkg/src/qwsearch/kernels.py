"""Backend selection for the hot kernels.

The compiled Cython module is used when it was built; otherwise the NumPy
fallback is loaded. Set ``QWSEARCH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("QWSEARCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

er_adjacency = _impl.er_adjacency
probability_curve = _impl.probability_curve
probability_curve_uniform = _impl.probability_curve_uniform
