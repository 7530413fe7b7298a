"""Kernel backend selection.

The compiled Cython core is used when available; set
``PSPRIMES_FORCE_FALLBACK=1`` to force the NumPy reference backend.
Both backends expose the same functions and agree to roundoff.
"""

import os

if os.environ.get("PSPRIMES_FORCE_FALLBACK"):
    from . import _ref as backend
else:
    try:
        from . import _core as backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _ref as backend

BACKEND_NAME = backend.NAME

sieve_range = backend.sieve_range
lpf_range = backend.lpf_range
power_sum = backend.power_sum
sawtooth_pair_sum = backend.sawtooth_pair_sum
phase_sum = backend.phase_sum
bilinear_phase_sum = backend.bilinear_phase_sum
fermat_base2_survivors = backend.fermat_base2_survivors
