"""Polar-code performance analysis toolkit.

Block-error-rate bounds for successive cancellation list (SCL) decoding,
a greedy bit-swapping code construction driven by those bounds, and a
reproducible Monte Carlo link simulator with path-loss / path-selection
error classification.

All SNRs are Es/N0 in dB. All bit indices in public contracts are 1-based.
"""

__version__ = "0.1.0"

from .core import CodeConfig, embed_message, polar_transform, row_weight
from .channel import ChannelParams, snr_to_sigma2, transmit

__all__ = [
    "CodeConfig",
    "ChannelParams",
    "embed_message",
    "polar_transform",
    "row_weight",
    "snr_to_sigma2",
    "transmit",
    "__version__",
]
