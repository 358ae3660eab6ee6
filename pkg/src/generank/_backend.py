"""Kernel backend selection: compiled extension when present, numpy otherwise.

Set ``GENERANK_BACKEND=cython`` or ``GENERANK_BACKEND=numpy`` to force a
backend; forcing ``cython`` when the extension was not built is an error.
"""
import os

from generank import _spmv_np

_FORCED = os.environ.get("GENERANK_BACKEND", "").strip().lower()

try:
    from generank import _spmv_cy
except ImportError:
    _spmv_cy = None

if _FORCED == "cython":
    if _spmv_cy is None:
        raise ImportError(
            "GENERANK_BACKEND=cython but the compiled extension is not built; "
            "reinstall the package with Cython and a C compiler available"
        )
    _impl = _spmv_cy
    BACKEND = "cython"
elif _FORCED == "numpy":
    _impl = _spmv_np
    BACKEND = "numpy"
elif _FORCED:
    raise ValueError(f"unknown GENERANK_BACKEND value: {_FORCED!r}")
else:
    _impl = _spmv_cy if _spmv_cy is not None else _spmv_np
    BACKEND = "cython" if _spmv_cy is not None else "numpy"

csr_spmv = _impl.csr_spmv


def backend_name():
    """Name of the kernel backend selected at import ('cython' or 'numpy')."""
    return BACKEND


def available_backends():
    """Names of the backends importable in this installation."""
    names = ["numpy"]
    if _spmv_cy is not None:
        names.insert(0, "cython")
    return names


def get_kernels(name=None):
    """Return the kernel module for `name` (default: the selected backend)."""
    if name is None:
        return _impl
    if name == "numpy":
        return _spmv_np
    if name == "cython":
        if _spmv_cy is None:
            raise ValueError("compiled backend not available in this installation")
        return _spmv_cy
    raise ValueError(f"unknown backend: {name!r}")
