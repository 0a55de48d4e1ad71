"""Quadrature backend selection: the compiled extension when importable,
the numpy implementation otherwise.  ``BMOLAB_BACKEND=python`` forces the
fallback (used by the parity tests and the benchmark)."""

import os

from . import _pycore

if os.environ.get("BMOLAB_BACKEND", "").lower() == "python":
    _impl = _pycore
else:
    try:
        from . import _quadcore as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pycore

BACKEND = _impl.BACKEND_NAME
bilinear_sum = _impl.bilinear_sum

SHAPE_SMOOTH = _pycore.SHAPE_SMOOTH
SHAPE_ODD = _pycore.SHAPE_ODD
TRUNC_NONE = _pycore.TRUNC_NONE
TRUNC_OUTER = _pycore.TRUNC_OUTER
TRUNC_INNER = _pycore.TRUNC_INNER

__all__ = [
    "BACKEND",
    "bilinear_sum",
    "SHAPE_SMOOTH",
    "SHAPE_ODD",
    "TRUNC_NONE",
    "TRUNC_OUTER",
    "TRUNC_INNER",
]
