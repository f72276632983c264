"""Kernel selection: the compiled extension when built, else the Python twin.

Set ``REVAC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("REVAC_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl, BACKEND = _compiled, "cython"

pair_sums = _impl.pair_sums
in_scores = _impl.in_scores
mutual_pairs = _impl.mutual_pairs
