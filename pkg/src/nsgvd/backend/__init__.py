"""Backend selection for the hot numeric kernels.

The compiled Cython module is preferred when it built; otherwise the pure
numpy fallback is used. `NSGVD_PURE_PYTHON=1` forces the fallback (used by
the backend benchmark and parity tests). Both implementations accumulate
squared distances by direct 64-bit summation.
"""

import os

from . import _numpy

if os.environ.get("NSGVD_PURE_PYTHON") == "1":
    _impl = _numpy
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy
        BACKEND = "python"

pairwise_sqdist = _impl.pairwise_sqdist
pairwise_sqdist_self = _impl.pairwise_sqdist_self

__all__ = ["BACKEND", "pairwise_sqdist", "pairwise_sqdist_self"]
