"""Deterministic, splittable random streams for reproducible simulation.

Every consumer of randomness (channel noise, codeword sampling) draws from a
SplitMix64 sequence keyed by (seed, stream).  Streams are cheap to create, so
the convention throughout the package is one stream per frame, keyed by the
absolute frame index.  This makes results independent of batching and worker
count.

Gaussian variates come from the Box-Muller transform applied to consecutive
pairs of 53-bit uniforms; an odd request discards the second half of the last
pair.  Random bits take the top bit of one 64-bit output each.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S63 = np.uint64(63)
_U53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, nogil=True)
def mix64(z):
    """SplitMix64 output function (Steele/Lea/Flood finalizer)."""
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def stream_state(seed, stream):
    """Initial SplitMix64 state of the (seed, stream) sequence."""
    return mix64(np.uint64(seed) + _GAMMA) ^ mix64(np.uint64(stream) * _MIX1 + _MIX2)


@njit(cache=True, nogil=True)
def next_u64(state):
    """Advance one step; returns (new_state, output)."""
    state = state + _GAMMA
    return state, mix64(state)


@njit(cache=True, nogil=True)
def next_unit(state):
    """Uniform double in [0, 1) from the top 53 bits."""
    state, x = next_u64(state)
    return state, np.float64(x >> _S11) * _U53


@njit(cache=True, nogil=True)
def fill_normals(state, out):
    """Fill `out` with standard normals via Box-Muller; returns final state."""
    count = out.size
    i = 0
    while i < count:
        state, u1 = next_unit(state)
        state, u2 = next_unit(state)
        r = np.sqrt(-2.0 * np.log(1.0 - u1))  # 1-u1 in (0,1]
        out[i] = r * np.cos(2.0 * np.pi * u2)
        if i + 1 < count:
            out[i + 1] = r * np.sin(2.0 * np.pi * u2)
        i += 2
    return state


@njit(cache=True, nogil=True)
def fill_bits(state, out):
    """Fill `out` with fair bits (one 64-bit draw per bit); returns final state."""
    for i in range(out.size):
        state, x = next_u64(state)
        out[i] = np.uint8(x >> _S63)
    return state


class FrameRng:
    """Stateful view of one (seed, stream) sequence.

    Draw order matters for reproducibility: callers consume bits/normals in a
    documented order (the channel draws message bits first, then noise).
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._state = np.uint64(stream_state(np.uint64(seed), np.uint64(stream)))

    def u64(self) -> int:
        state, x = next_u64(self._state)
        self._state = np.uint64(state)
        return int(x)

    def uniform(self) -> float:
        state, u = next_unit(self._state)
        self._state = np.uint64(state)
        return u

    def normal(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.float64)
        self._state = np.uint64(fill_normals(self._state, out))
        return out

    def bits(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.uint8)
        self._state = np.uint64(fill_bits(self._state, out))
        return out
