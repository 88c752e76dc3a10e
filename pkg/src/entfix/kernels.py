"""Backend selection for the edit-distance kernels.

The compiled extension is preferred; set ``ENTFIX_PURE_PYTHON=1`` to force
the pure-Python implementation (used by the benchmark and parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("ENTFIX_PURE_PYTHON"):
    from entfix import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from entfix import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from entfix import _pykernels as _impl  # type: ignore[no-redef]

        BACKEND = "python"

levenshtein = _impl.levenshtein
levenshtein_batch = _impl.levenshtein_batch
