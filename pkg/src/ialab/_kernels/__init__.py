"""Kernel selection: compiled extension when available, pure Python otherwise.

Both implementations draw from the same SplitMix64 stream and run the same
algorithms, so results are identical either way.  Set IALAB_PURE_PYTHON=1 to
force the fallback (used by the benchmark and the parity tests).
"""

import os

from . import pyfallback
from .rng import mix64, next_u64, substream_state, uniform_nonzero

if os.environ.get("IALAB_PURE_PYTHON"):
    impl = pyfallback
else:
    try:
        from . import _ffcore as impl  # type: ignore[attr-defined]
    except ImportError:
        impl = pyfallback

IMPLEMENTATION = impl.IMPLEMENTATION

sample_matrix = impl.sample_matrix
uniform_nonzero_batch = impl.uniform_nonzero_batch
ngjv_trial = impl.ngjv_trial
stage_wait = impl.stage_wait


def available_implementations():
    """Name -> module for every kernel implementation importable here."""
    impls = {"python": pyfallback}
    try:
        from . import _ffcore

        impls["compiled"] = _ffcore
    except ImportError:
        pass
    return impls
