"""Backend selection for the hot kernels.

The compiled Cython core is preferred when importable; the NumPy backend is
the drop-in fallback.  UAVQAD_BACKEND=numpy|compiled forces a choice
(forcing "compiled" raises if the extension is missing).  Both backends
expose:

  dru_expectations(theta, x, n_qubits, n_layers) -> (batch, n_qubits)
  best_split_sse(x_sorted, t_sorted, min_leaf) -> (gain, pos)
"""

from __future__ import annotations

import os

from . import numpy_backend


def _select():
    forced = os.environ.get("UAVQAD_BACKEND", "auto").lower()
    if forced == "numpy":
        return numpy_backend
    try:
        from . import _fastcore
    except ImportError:
        if forced == "compiled":
            raise ImportError(
                "UAVQAD_BACKEND=compiled but the uavqad.kernels._fastcore "
                "extension is not built"
            )
        return numpy_backend
    return _fastcore


_backend = _select()

backend_name: str = _backend.NAME
dru_expectations = _backend.dru_expectations
best_split_sse = _backend.best_split_sse


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        from . import _fastcore  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return a specific backend module by name (for tests and benchmarks)."""
    if name == "numpy":
        return numpy_backend
    if name == "compiled":
        from . import _fastcore

        return _fastcore
    raise ValueError(f"unknown backend {name!r}")
