"""String-kernel backend selection.

Imports the compiled extension when it is installed and falls back to the
pure-Python implementation otherwise. `TABKG_PURE_PYTHON=1` forces the
fallback (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

if os.environ.get("TABKG_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

levenshtein = _impl.levenshtein
similarity = _impl.similarity
bounded_similarity = _impl.bounded_similarity
scan_labels = _impl.scan_labels

__all__ = ["BACKEND", "levenshtein", "similarity", "bounded_similarity", "scan_labels"]
