"""Backend dispatch for the Monte Carlo hot kernels.

The env var LSFP_BACKEND selects the implementation:

- "numba" : jitted kernels (error if numba is unavailable)
- "numpy" : pure-numpy einsum path
- "auto"  : numba when importable, else numpy (default)

Both backends implement identical contracts; `benchmarks/bench_kernels.py`
compares them.
"""

import os

from lsfp import _kernels_numpy

_BACKENDS = {"numpy": _kernels_numpy}
try:
    from lsfp import _kernels_numba

    _BACKENDS["numba"] = _kernels_numba
except ImportError:  # pragma: no cover - numba is an install-time dependency
    _kernels_numba = None


def backend_name() -> str:
    choice = os.environ.get("LSFP_BACKEND", "auto").lower()
    if choice == "auto":
        return "numba" if "numba" in _BACKENDS else "numpy"
    if choice not in _BACKENDS:
        raise ValueError(
            f"LSFP_BACKEND={choice!r} not available; choose from "
            f"{sorted(_BACKENDS)} or 'auto'"
        )
    return choice


def get_backend(name: str | None = None):
    return _BACKENDS[name or backend_name()]
