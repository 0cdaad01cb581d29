"""Kernel backend selection.

Two interchangeable kernel sets exist: a numba-jitted one (``numba``) and a
pure-numpy one (``numpy``). The env var ``FPRISK_BACKEND`` forces a choice;
otherwise numba is used when it imports cleanly. Both backends are
deterministic for a fixed seed and worker count, but they draw from different
(equally valid) random streams, so replicate-level values differ between them.
"""

from __future__ import annotations

import os

BACKENDS = ("numba", "numpy")

_numba_import_error: Exception | None = None
_numba_checked = False


def _numba_usable() -> bool:
    global _numba_checked, _numba_import_error
    if not _numba_checked:
        try:
            from . import _kernels_numba  # noqa: F401
        except Exception as exc:  # pragma: no cover - environment dependent
            _numba_import_error = exc
        _numba_checked = True
    return _numba_import_error is None


def default_backend() -> str:
    """Resolve the active backend name from FPRISK_BACKEND or availability."""
    forced = os.environ.get("FPRISK_BACKEND", "").strip().lower()
    if forced:
        if forced not in BACKENDS:
            raise ValueError(
                f"FPRISK_BACKEND must be one of {BACKENDS}, got {forced!r}"
            )
        if forced == "numba" and not _numba_usable():
            raise ImportError(
                f"FPRISK_BACKEND=numba but numba kernels failed to import: "
                f"{_numba_import_error}"
            )
        return forced
    return "numba" if _numba_usable() else "numpy"


def get_kernels(name: str | None = None):
    """Return the kernel module for `name` (or the default backend)."""
    name = name or default_backend()
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    if name == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
