"""Hot update kernels with backend selection at import time.

The compiled Cython backend is preferred; if the extension is missing
(pure-Python install, or compilation skipped) the numpy fallback is used.
Set ``SOFIM_BACKEND=numpy`` to force the fallback, or ``SOFIM_BACKEND=cython``
to require the extension (ImportError if absent).
"""

import os

_requested = os.environ.get("SOFIM_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "cython"):
    try:
        from sofim._kernels._fused import (  # noqa: F401
            adam_update,
            sgd_momentum_update,
            sofim_update,
        )

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from sofim._kernels._numpy import (  # noqa: F401
            adam_update,
            sgd_momentum_update,
            sofim_update,
        )

        BACKEND = "numpy"
elif _requested in ("numpy", "python"):
    from sofim._kernels._numpy import (  # noqa: F401
        adam_update,
        sgd_momentum_update,
        sofim_update,
    )

    BACKEND = "numpy"
else:
    raise ImportError(
        f"unknown SOFIM_BACKEND value {_requested!r}; use 'auto', 'cython' or 'numpy'"
    )

__all__ = ["BACKEND", "adam_update", "sgd_momentum_update", "sofim_update"]
