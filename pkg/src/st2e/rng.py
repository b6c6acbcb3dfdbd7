"""Deterministic random-substream derivation.

Every path of an ensemble (and every replicate of a benchmark) gets its own
``numpy`` generator whose seed is a 64-bit avalanche mix of the master seed
and the path/replicate index.  Because the seed depends only on ``(master,
index)``, results are identical no matter how many workers execute the work
or in which order rows complete.

The mixing function is the SplitMix64 finalizer (public-domain constants):
add the golden-ratio increment per index, then xor-shift-multiply twice.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(master_seed: int, index: int) -> int:
    """Map ``(master_seed, index)`` to a scrambled 64-bit substream seed."""
    z = (master_seed + _GOLDEN * (index + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for unit of work ``index`` under ``master_seed``."""
    return np.random.default_rng(mix64(master_seed, index))
