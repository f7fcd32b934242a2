"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The Cython module ``ltlab._ckernels`` is preferred.  Set the environment
variable ``LTLAB_PURE_PYTHON=1`` before import to force the fallback.
``BACKEND`` names the implementation actually in use.
"""
import os

from ltlab import _pykernels

if os.environ.get("LTLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from ltlab import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

pivot_floor = _impl.pivot_floor
sturm_count = _impl.sturm_count
sturm_counts = _impl.sturm_counts
bisect_eigenvalues = _impl.bisect_eigenvalues
pair_exclusion = _impl.pair_exclusion


def backends():
    """Map backend name to module for every importable implementation."""
    out = {"python": _pykernels}
    try:
        from ltlab import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
