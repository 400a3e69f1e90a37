"""Backend selection for the SOM hot kernels.

The compiled extension is preferred; set SONFIS_BACKEND=numpy to force the
pure-NumPy fallback (used by the benchmark and by CI without a compiler).
"""

import os

_forced = os.environ.get("SONFIS_BACKEND", "").strip().lower()

if _forced in ("numpy", "python"):
    from . import _somcore_py as _impl
elif _forced == "cython":
    from . import _somcore as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _somcore as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _somcore_py as _impl

BACKEND = _impl.BACKEND
assign_bmus = _impl.assign_bmus
accumulate_by_bmu = _impl.accumulate_by_bmu
