"""Splittable random streams built on the SplitMix64 mixing function.

Every simulated trajectory (one control cycle, or one replication run)
owns its own stream, derived from ``(seed, stream_index)`` alone, so
results do not depend on execution order or scheduling.  Stream ``i``
starts from the avalanched state ``mix64(seed + (i + 1) * GOLDEN_GAMMA)``
and advances by the usual SplitMix64 increment-and-mix step; uniforms
take the top 53 bits of each output word.

The functions here are deliberately backend-neutral: the numba kernels
jit-compile them for scalar uint64 state, while the numpy kernels apply
them to uint64 arrays.  Pure-numpy callers must stick to arrays, since
scalar uint64 arithmetic in numpy emits overflow warnings on the wrap
that the mixer relies on.
"""

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_MUL_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_MUL_B = np.uint64(0x94D049BB133111EB)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)

#: shift dropping a uint64 to its top 53 bits
SHIFT_TO_53 = np.uint64(11)
#: scale mapping 53 bits onto a double in [0, 1)
UNIT_SCALE = 1.0 / 9007199254740992.0


def seed_to_uint64(seed):
    """Map an arbitrary Python integer seed onto the uint64 wheel."""
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def mix64(z):
    """SplitMix64 finalizer: avalanche a uint64 word (scalar or array)."""
    z = (z ^ (z >> _SHIFT_30)) * _MIX_MUL_A
    z = (z ^ (z >> _SHIFT_27)) * _MIX_MUL_B
    return z ^ (z >> _SHIFT_31)


def stream_origins(seed, start, count):
    """Initial states for streams ``start .. start + count - 1`` (array)."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return mix64(seed + (idx + np.uint64(1)) * GOLDEN_GAMMA)


def next_uniforms(states):
    """Advance an array of stream states one step; return new states and
    the matching uniforms in [0, 1)."""
    states = states + GOLDEN_GAMMA
    word = mix64(states)
    return states, (word >> SHIFT_TO_53) * UNIT_SCALE
