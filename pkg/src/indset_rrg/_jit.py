"""Compilation presets shared by the numba kernels.

Kernels only touch arrays owned by Python-side state objects and never
allocate, so the runtime's reference counting is switched off.  With it on,
every read of an array field of a state tuple costs an incref/decref pair,
which dominates the running time of the labeling loop.
"""

from numba import njit

kernel = njit(cache=True, _nrt=False)
inline_kernel = njit(cache=True, _nrt=False, inline="always")
