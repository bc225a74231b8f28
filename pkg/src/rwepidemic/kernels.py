"""Backend selection for the hot loops.

Set ``RWEPIDEMIC_NO_JIT=1`` to force the pure-numpy path (also used
automatically when numba is not importable).
"""

import os

_disabled = os.environ.get("RWEPIDEMIC_NO_JIT", "").lower() in ("1", "true", "yes")

BACKEND = "numpy"
if not _disabled:
    try:
        from ._kernels_nb import advance, pair_meeting, simulate
        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        pass

if BACKEND == "numpy":
    from ._kernels_np import advance, pair_meeting, simulate  # noqa: F811

__all__ = ["BACKEND", "advance", "pair_meeting", "simulate"]
