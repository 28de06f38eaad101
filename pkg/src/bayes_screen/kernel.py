"""Sweep-kernel selection: compiled extension when available, pure Python
otherwise. Override with the BAYES_SCREEN_KERNEL environment variable
('cython' or 'python') or per call via ``get_sweep_kernel``.
"""

from __future__ import annotations

import os

from . import _sweep_py

try:
    from . import _sweep as _sweep_cy

    HAS_COMPILED = True
except ImportError:
    _sweep_cy = None
    HAS_COMPILED = False


def get_sweep_kernel(impl: str | None = None):
    """Return the sweep_blocks callable for the requested implementation."""
    if impl is None:
        impl = os.environ.get("BAYES_SCREEN_KERNEL", "auto")
    impl = impl.lower()
    if impl == "auto":
        impl = "cython" if HAS_COMPILED else "python"
    if impl == "cython":
        if not HAS_COMPILED:
            raise RuntimeError("compiled sweep kernel is not available")
        return _sweep_cy.sweep_blocks
    if impl == "python":
        return _sweep_py.sweep_blocks
    raise ValueError(f"unknown kernel implementation {impl!r}")


def active_kernel_name() -> str:
    impl = os.environ.get("BAYES_SCREEN_KERNEL", "auto").lower()
    if impl == "auto":
        return "cython" if HAS_COMPILED else "python"
    return impl
