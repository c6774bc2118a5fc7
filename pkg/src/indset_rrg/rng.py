"""SplitMix64 pseudo-random generator usable from numba kernels.

The whole generator state is one unsigned 64-bit word kept in a length-1
``uint64`` array so jitted code can advance it in place.  The output stream
is the reference SplitMix64 sequence (Steele, Lea & Flood, 2014), so a run is
reproducible bit-for-bit on any platform.
"""

import numpy as np

from ._jit import kernel

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@kernel
def mix64(z):
    """SplitMix64 output finalizer (a bijection on 64-bit words)."""
    z = np.uint64(z)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@kernel
def next_u64(state):
    state[0] += GOLDEN
    return mix64(state[0])


@kernel
def next_float(state):
    """Uniform double in [0, 1) built from the top 53 bits."""
    return np.float64(next_u64(state) >> _S11) * _INV53


@kernel
def below(state, n):
    """Uniform integer in [0, n); n must be positive and below 2**53."""
    return np.int64(next_float(state) * n)


def new_state(seed: int) -> np.ndarray:
    return np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)


def run_seed(base_seed: int, d: int, n: int, index: int) -> int:
    """Per-run seed for batch plans: ``base_seed XOR mix(d, n, index)``.

    ``mix`` chains the SplitMix64 finalizer over the three integers, so a
    single run can be reproduced without replaying the rest of the plan.
    """
    mask = 0xFFFFFFFFFFFFFFFF
    h = int(mix64(np.uint64(d & mask)))
    h = int(mix64(np.uint64((h ^ (n & mask)) & mask)))
    h = int(mix64(np.uint64((h ^ (index & mask)) & mask)))
    return (base_seed ^ h) & mask
