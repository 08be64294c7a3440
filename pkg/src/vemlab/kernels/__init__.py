"""Evaluation kernels with a compiled fast path.

The compiled extension is preferred when present; set ``VEMLAB_KERNELS`` to
``python`` or ``c`` to force a backend (``auto`` is the default).
"""

import os

_choice = os.environ.get("VEMLAB_KERNELS", "auto").lower()

if _choice not in ("auto", "c", "python"):
    raise ValueError(f"VEMLAB_KERNELS must be auto, c or python, got {_choice!r}")

if _choice in ("auto", "c"):
    try:
        from ._speedups import monomial_vandermonde, monomial_vandermonde_grad

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        from ._fallback import monomial_vandermonde, monomial_vandermonde_grad

        BACKEND = "python"
else:
    from ._fallback import monomial_vandermonde, monomial_vandermonde_grad

    BACKEND = "python"


def backend_name():
    """Name of the active kernel backend ("c" or "python")."""
    return BACKEND


__all__ = ["monomial_vandermonde", "monomial_vandermonde_grad", "backend_name", "BACKEND"]
