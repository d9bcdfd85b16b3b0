"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``NCPOWER_PURE=1`` to force the fallback.
"""

import os

from ncpower._kernels import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("NCPOWER_PURE", "") not in ("1", "true", "yes"):
    try:
        from ncpower._kernels import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

CONVENTIONAL = _pykernels.CONVENTIONAL
NC_ZERO_PAD = _pykernels.NC_ZERO_PAD
NC_PARTITION = _pykernels.NC_PARTITION

hop_matrix = _impl.hop_matrix
enumerate_best = _impl.enumerate_best
combo_power = _impl.combo_power

__all__ = [
    "BACKEND", "hop_matrix", "enumerate_best", "combo_power",
    "CONVENTIONAL", "NC_ZERO_PAD", "NC_PARTITION",
]
