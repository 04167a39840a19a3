"""Kernel lane selection: compiled extension if available, numpy fallback.

Set HOMROI_PURE_KERNELS=1 to force the pure lane (used by the benchmark
and by lane-agreement tests).
"""

import os

if os.environ.get("HOMROI_PURE_KERNELS"):
    from . import pure as _impl
else:
    try:
        from . import conekern as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
nnls_project = _impl.nnls_project
project_distances = _impl.project_distances
project_many = _impl.project_many

__all__ = ["BACKEND", "nnls_project", "project_distances", "project_many"]
