"""Enumeration kernel backends.

The compiled Cython kernel is preferred when its extension module built;
otherwise the numpy reference implementation is used.  Set the environment
variable ``NFGCOVER_PURE_PYTHON=1`` to force the fallback.  Both backends
share one contract, documented in ``_reference``.
"""

from __future__ import annotations

import os

from . import _reference

if os.environ.get("NFGCOVER_PURE_PYTHON", "") not in ("", "0"):
    _impl = _reference
    BACKEND = "python"
else:
    try:
        from . import _fastcore as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND = "python"

sum_range = _impl.sum_range
values_range = _impl.values_range
signed_log_sum_range = _impl.signed_log_sum_range
config_digits = _reference.config_digits


def backend() -> str:
    """Name of the backend selected at import: 'compiled' or 'python'."""
    return BACKEND


def available_backends() -> dict[str, object]:
    """All importable backends, for benchmarking and cross-checks."""
    found: dict[str, object] = {"python": _reference}
    try:
        from . import _fastcore

        found["compiled"] = _fastcore
    except ImportError:
        pass
    return found
