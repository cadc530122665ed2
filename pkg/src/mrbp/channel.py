"""BPSK over the binary-input AWGN channel: modulation, noise, LLRs.

Conventions: bit 0 maps to +1, bit 1 to -1; the channel LLR of bit i is
2*y_i/sigma2 (positive favours bit 0); the hard decision is 1 iff y_i <= 0.
SNR is Eb/N0 in dB with sigma2 = N0/2 = 1 / (2 * rate * 10^(EbN0/10)) for
unit-energy BPSK.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ParityCheckCode
from .rng import FrameRng


def sigma2_from_ebn0(eb_n0_db: float, rate: float) -> float:
    """Noise variance for a given Eb/N0 (dB) and code rate."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (eb_n0_db / 10.0))


@dataclass(frozen=True)
class SnrSpec:
    eb_n0_db: float
    rate: float

    @property
    def sigma2(self) -> float:
        return sigma2_from_ebn0(self.eb_n0_db, self.rate)


def modulate(bits: np.ndarray) -> np.ndarray:
    """BPSK map (-1)^bit: 0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


@dataclass(frozen=True)
class LlrFrame:
    """One received word with its derived channel quantities.

    Invariants: l_ch = 2*y/sigma2, z[i] = (y[i] <= 0), s_ch = syndrome(z).
    """

    y: np.ndarray       # float64 (n,)
    l_ch: np.ndarray    # float64 (n,)
    z: np.ndarray       # uint8 (n,)
    s_ch: np.ndarray    # uint8 (m,)
    sigma2: float

    @property
    def n(self) -> int:
        return self.y.size


def make_frame(code: ParityCheckCode, y: np.ndarray, sigma2: float) -> LlrFrame:
    """Derive LLRs, hard decision and syndrome from received values."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    y = np.asarray(y, dtype=np.float64)
    l_ch = 2.0 * y / sigma2
    z = (y <= 0).astype(np.uint8)
    return LlrFrame(y=y, l_ch=l_ch, z=z, s_ch=code.syndrome(z), sigma2=sigma2)


def transmit(code: ParityCheckCode, x: np.ndarray, sigma2: float, rng: FrameRng) -> LlrFrame:
    """Send modulated word x through the AWGN channel using the given stream."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    x = np.asarray(x, dtype=np.float64)
    y = x + np.sqrt(sigma2) * rng.normal(x.size)
    return make_frame(code, y, sigma2)
