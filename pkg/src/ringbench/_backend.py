"""Kernel backend selection.

The shortest-path kernels exist twice: a numba-compiled version
(:mod:`ringbench._kernels_numba`) and a pure-numpy fallback
(:mod:`ringbench._kernels_numpy`).  The active backend is chosen once per
process from the ``RINGBENCH_BACKEND`` environment variable:

* ``numba`` -- require numba, fail loudly if it cannot be imported
* ``numpy`` -- force the pure-numpy path
* unset    -- use numba when importable, numpy otherwise

``RINGBENCH_THREADS`` caps the numba thread count (default: numba's own).
"""

from __future__ import annotations

import os
import warnings

_VALID = ("numba", "numpy")
_active: str | None = None


def _detect() -> str:
    requested = os.environ.get("RINGBENCH_BACKEND", "").strip().lower()
    if requested and requested not in _VALID:
        raise ValueError(
            f"RINGBENCH_BACKEND must be one of {_VALID}, got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        with warnings.catch_warnings():
            # TBB-version warnings from the threading layer probe are harmless.
            warnings.simplefilter("ignore")
            import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    threads = os.environ.get("RINGBENCH_THREADS", "").strip()
    if threads:
        import numba

        numba.set_num_threads(max(1, int(threads)))
    return "numba"


def backend_name() -> str:
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    global _active
    if _active is None:
        _active = _detect()
    return _active


def set_backend(name: str) -> None:
    """Override the active backend (used by tests and benchmarks)."""
    global _active
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    _active = name
