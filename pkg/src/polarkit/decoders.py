"""SC, SCL and CRC-aided SCL decoders, plus a brute-force ML oracle.

Path metrics are exact log-domain path probabilities: each decoding step
adds -ln(1 + exp(-(1-2u) * theta)) to the metric, frozen bits included,
so metric differences equal log-probability-ratio differences and SCL
with a full list reproduces the ML decision. LLR magnitudes are clamped
to +/-40 inside the check-node combine; at simulated SNRs this never
changes a decision (covered by tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import CodeConfig, as_bits, polar_transform
from .exceptions import CapacityError

__all__ = [
    "CrcSpec",
    "DecodePath",
    "PathList",
    "PathTrace",
    "ca_scl_decode",
    "crc_attach",
    "crc_check",
    "extract_message",
    "llr_combine_check",
    "llr_combine_var",
    "ml_codebook",
    "ml_decode_bruteforce",
    "sc_decode",
    "scl_decode",
    "select_crc_path",
]

LLR_CLAMP = 40.0

ML_MAX_K = 24


def llr_combine_check(a: float, b: float) -> float:
    """Check-node LLR combine 2*atanh(tanh(a/2)*tanh(b/2)).

    Inputs are clamped to +/-LLR_CLAMP, then the algebraically equal
    log-domain form min-magnitude + log1p corrections is evaluated, which
    never overflows.
    """
    a = min(max(a, -LLR_CLAMP), LLR_CLAMP)
    b = min(max(b, -LLR_CLAMP), LLR_CLAMP)
    r = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        r = -r
    sab = abs(a + b)
    sad = abs(a - b)
    if sab < 37.0:
        r += math.log1p(math.exp(-sab))
    if sad < 37.0:
        r -= math.log1p(math.exp(-sad))
    return r


def llr_combine_var(a: float, b: float, u: int) -> float:
    """Variable-node LLR combine (1-2u)*a + b."""
    return (1.0 - 2.0 * u) * a + b


@dataclass(frozen=True)
class DecodePath:
    """A survival path: bit decisions and ln P(u_1^i | y) up to a constant."""

    bits: np.ndarray
    log_metric: float


@dataclass(frozen=True)
class PathList:
    """Final decoded list: up to L paths with their log metrics."""

    paths_u: np.ndarray  # uint8[active, N]
    metrics: np.ndarray  # float64[active]
    L: int

    def __len__(self):
        return self.paths_u.shape[0]

    def path(self, i: int) -> DecodePath:
        return DecodePath(bits=self.paths_u[i], log_metric=float(self.metrics[i]))


@dataclass(frozen=True)
class PathTrace:
    """Survivor-set membership of the reference path, per decoding step.

    ``ref_in_list[i]`` (0-based step) is 1 while the reference path is in
    the survivor set after step i+1; ``first_loss_step`` is the 1-based
    step where it was dropped, or None. Empty trace when no reference
    path was supplied.
    """

    ref_in_list: np.ndarray | None
    first_loss_step: int | None

    @property
    def ref_in_final_list(self) -> bool:
        if self.ref_in_list is None:
            raise ValueError("trace was built without a reference path")
        return bool(self.ref_in_list[-1])


def sc_decode(llr, cfg: CodeConfig) -> np.ndarray:
    """Successive cancellation decode; returns the full u-vector estimate."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size != cfg.N:
        raise ValueError(f"LLR length {llr.size} != N={cfg.N}")
    return kernels.sc_decode(llr, cfg.frozen_mask)


def scl_decode(llr, cfg: CodeConfig, L: int, ref_u=None):
    """Breadth-first SCL decode with L survival paths.

    Returns ``(selected, path_list, trace)``; ``selected`` is the
    metric-best path (ties to the lower path index). Pass the transmitted
    u-vector as ``ref_u`` to obtain a survivor-membership trace for
    path-loss/path-selection classification.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size != cfg.N:
        raise ValueError(f"LLR length {llr.size} != N={cfg.N}")
    paths, metrics, best, ref_member, first_loss = kernels.scl_decode(
        llr, cfg.frozen_mask, L, ref_u
    )
    plist = PathList(paths_u=paths, metrics=metrics, L=L)
    trace = PathTrace(
        ref_in_list=ref_member,
        first_loss_step=first_loss if first_loss >= 0 else None,
    )
    return paths[best].copy(), plist, trace


@dataclass(frozen=True)
class CrcSpec:
    """CRC generator: ``polynomial`` holds the r coefficients below the
    implicit leading term, MSB first."""

    polynomial: tuple
    r: int

    def __post_init__(self):
        if len(self.polynomial) != self.r:
            raise ValueError("polynomial must list exactly r coefficients")
        if any(b not in (0, 1) for b in self.polynomial):
            raise ValueError("polynomial coefficients must be bits")

    @classmethod
    def from_int(cls, poly: int, r: int) -> "CrcSpec":
        if poly >> r:
            raise ValueError(f"polynomial value needs more than r={r} bits")
        bits = tuple((poly >> (r - 1 - j)) & 1 for j in range(r))
        return cls(polynomial=bits, r=r)


# Documented default polynomials (placeholders, not tuned optima): the
# 3GPP NR uplink CRCs of matching length.
CRC8_DEFAULT = CrcSpec.from_int(0x9B, 8)
CRC11_DEFAULT = CrcSpec.from_int(0x621, 11)


def _crc_remainder(bits, spec: CrcSpec) -> np.ndarray:
    reg = np.concatenate([np.asarray(bits, dtype=np.uint8), np.zeros(spec.r, np.uint8)])
    g = np.asarray(spec.polynomial, dtype=np.uint8)
    for i in range(reg.size - spec.r):
        if reg[i]:
            reg[i] = 0
            reg[i + 1 : i + 1 + spec.r] ^= g
    return reg[-spec.r :]


def crc_attach(v, spec: CrcSpec) -> np.ndarray:
    """Append the r-bit remainder of v(x) * x^r mod g(x)."""
    v = as_bits(v)
    return np.concatenate([v, _crc_remainder(v, spec)])


def crc_check(msg, spec: CrcSpec) -> bool:
    """True iff the trailing r bits are the CRC of the leading payload."""
    msg = as_bits(msg)
    if msg.size <= spec.r:
        raise ValueError("message shorter than the CRC")
    return not _crc_remainder(msg, spec).any()


def extract_message(u, cfg: CodeConfig) -> np.ndarray:
    """The K message bits v_k = u_{a_k} of a decoded u-vector."""
    return np.asarray(u, dtype=np.uint8)[cfg.info_idx0]


def select_crc_path(plist: PathList, cfg: CodeConfig, spec: CrcSpec) -> int:
    """Index of the metric-best CRC-valid path; metric-best overall if none."""
    order = sorted(range(len(plist)), key=lambda i: (-plist.metrics[i], i))
    for i in order:
        if crc_check(extract_message(plist.paths_u[i], cfg), spec):
            return i
    return order[0]


def ca_scl_decode(llr, cfg: CodeConfig, L: int, spec: CrcSpec, ref_u=None):
    """SCL search plus CRC-gated final selection (fallback: metric-best)."""
    if cfg.K <= spec.r:
        raise ValueError(f"K={cfg.K} leaves no payload after an r={spec.r} CRC")
    _, plist, trace = scl_decode(llr, cfg, L, ref_u=ref_u)
    pick = select_crc_path(plist, cfg, spec)
    return plist.paths_u[pick].copy(), plist, trace


def ml_codebook(cfg: CodeConfig) -> np.ndarray:
    """All 2^K codewords as a uint8 matrix, message value = row index."""
    if cfg.K > ML_MAX_K:
        raise CapacityError(f"ML enumeration guard: K={cfg.K} > {ML_MAX_K}")
    n_msgs = 1 << cfg.K
    # message bit k (1-based) is the 2^(K-k) place of the row index, so
    # row index equals the integer value of the message bit string
    msgs = ((np.arange(n_msgs)[:, None] >> np.arange(cfg.K - 1, -1, -1)) & 1).astype(
        np.uint8
    )
    cb = np.zeros((n_msgs, cfg.N), dtype=np.uint8)
    cb[:, cfg.info_idx0] = msgs
    h = cfg.N >> 1
    while h >= 1:
        blocks = cb.reshape(n_msgs, -1, 2 * h)
        blocks[:, :, :h] ^= blocks[:, :, h:]
        h >>= 1
    return cb


def ml_decode_bruteforce(llr, cfg: CodeConfig, codebook=None) -> np.ndarray:
    """Exact ML decision by enumeration (K <= 24).

    Maximizes the exact likelihood, i.e. the correlation
    sum_i (1-2x_i) llr_i, which equals minimizing
    sum_i ln(1+exp(-(1-2x_i) llr_i)) up to an x-independent constant.
    Ties break to the smallest message value.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size != cfg.N:
        raise ValueError(f"LLR length {llr.size} != N={cfg.N}")
    if codebook is None:
        codebook = ml_codebook(cfg)
    corr = (1.0 - 2.0 * codebook.astype(np.float64)) @ llr
    best = int(np.argmax(corr))  # first max = smallest message value
    u = np.zeros(cfg.N, dtype=np.uint8)
    msg = np.array(
        [(best >> (cfg.K - 1 - j)) & 1 for j in range(cfg.K)], dtype=np.uint8
    )
    u[cfg.info_idx0] = msg
    return u
