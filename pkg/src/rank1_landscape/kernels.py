"""Float kernel selection: compiled extension if built, numpy otherwise.

``RANK1_LANDSCAPE_PURE=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("RANK1_LANDSCAPE_PURE"):
    impl = _kernels_py
else:
    try:
        from . import _kernels as impl
    except ImportError:
        impl = _kernels_py

COMPILED = impl is not _kernels_py

f_value = impl.f_value
fp_value = impl.fp_value
subgradient = impl.subgradient
subgradient_path = impl.subgradient_path
grid_values = impl.grid_values
