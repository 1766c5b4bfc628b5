"""Hot-loop kernels with import-time backend selection.

The compiled Cython extension is preferred when it was built; otherwise
the numpy fallback is used. Set ``PREVCAST_PURE_PYTHON=1`` to force the
fallback (useful for debugging and for the kernel benchmark).
"""

from __future__ import annotations

import os

_force_pure = os.environ.get("PREVCAST_PURE_PYTHON", "0") not in ("", "0")

if _force_pure:
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

arma_css_residuals = _impl.arma_css_residuals
gru_forward = _impl.gru_forward
gru_backward = _impl.gru_backward

__all__ = ["BACKEND", "arma_css_residuals", "gru_forward", "gru_backward"]
