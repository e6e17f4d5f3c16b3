"""BI-AWGN channel: BPSK mapping, seeded noise, channel LLRs.

SNR is Es/N0 in dB with Es normalized to 1, so the per-dimension noise
variance is sigma^2 = 1 / (2 * 10^(EsN0_dB/10)).

Randomness comes from numpy's Philox, a 64-bit counter-based generator
with documented stream splitting: trial t draws from
``Philox(key=seed, counter=t << 128)``, giving each trial its own
2^128-step block. Gaussians use numpy's ziggurat sampler; the generator
and sampler are pinned per release for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import as_bits

__all__ = [
    "ChannelParams",
    "llr_from_y",
    "snr_to_sigma2",
    "transmit",
    "trial_rng",
]


def snr_to_sigma2(es_n0_db: float) -> float:
    """Noise variance per real dimension for a given Es/N0 in dB (Es = 1)."""
    return 1.0 / (2.0 * 10.0 ** (es_n0_db / 10.0))


@dataclass(frozen=True)
class ChannelParams:
    """Channel operating point plus the 64-bit RNG seed."""

    es_n0_db: float
    seed: int = 0
    sigma2: float = field(init=False)

    def __post_init__(self):
        s2 = snr_to_sigma2(self.es_n0_db)
        if not s2 > 0.0:
            raise ValueError(f"non-positive noise variance from {self.es_n0_db} dB")
        object.__setattr__(self, "sigma2", s2)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream: Philox counter split at trial << 128."""
    return np.random.Generator(np.random.Philox(key=seed, counter=trial << 128))


def llr_from_y(y, sigma2: float) -> np.ndarray:
    """Channel LLR 2 y / sigma^2 for BPSK with s = 1 - 2x."""
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2


def transmit(x, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """BPSK-modulate x, add N(0, sigma2) noise from rng, return channel LLRs."""
    x = as_bits(x)
    s = 1.0 - 2.0 * x.astype(np.float64)
    y = s + rng.standard_normal(x.size) * np.sqrt(params.sigma2)
    return llr_from_y(y, params.sigma2)
