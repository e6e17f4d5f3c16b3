"""Gaussian-approximation density evolution for BI-AWGN synthetic channels.

Tracks only the mean of each synthetic channel's LLR. Channel LLRs enter
as N(mu, 2*mu) with mu = 2/sigma^2; the variable-node update doubles the
mean and the check-node update is mu -> phiinv(1 - (1 - phi(mu))^2),
with the two-segment "improved GA" phi:

    phi(x) = exp(-0.4527 x^0.86 + 0.0218)            0 < x < 10
    phi(x) = sqrt(pi/x) exp(-x/4) (1 - 10/(7x))      x >= 10

phi is evaluated in the log domain so deep polarization (tiny phi) stays
representable; phiinv uses bisection plus Newton polish to 1e-9 absolute.
Channel i's equivalent noise variance is sigma_i^2 = 2/mu_i, so the
message-bit LLR L_k is N(mu, 2*mu) with mu = 2/sigma_{a_k}^2.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, replace

import numpy as np

from .channel import llr_from_y
from .core import CodeConfig

__all__ = [
    "PHI_VERSION",
    "ReliabilityProfile",
    "bit_error_prob",
    "ga_evolve",
    "log_phi",
    "mc_density_oracle",
    "phi",
    "phi_inv",
]

PHI_VERSION = "improved-two-segment-v1"

_SEGMENT_SPLIT = 10.0
_X_LO, _X_HI = 1e-12, 1e9


def log_phi(x: float) -> float:
    """ln phi(x) for x > 0 (phi extends continuously with phi(0) ~ e^0.0218)."""
    if x < _SEGMENT_SPLIT:
        return -0.4527 * x**0.86 + 0.0218
    return 0.5 * math.log(math.pi / x) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


def phi(x):
    """The GA check-node transfer function (vectorized)."""
    x = np.asarray(x, dtype=np.float64)
    lo = -0.4527 * np.power(np.maximum(x, 1e-300), 0.86) + 0.0218
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = 0.5 * np.log(np.pi / x) - x / 4.0 + np.log1p(-10.0 / (7.0 * x))
    out = np.exp(np.where(x < _SEGMENT_SPLIT, lo, hi))
    return out if out.ndim else float(out)


def _dlogphi(x: float) -> float:
    if x < _SEGMENT_SPLIT:
        return -0.4527 * 0.86 * x ** (0.86 - 1.0)
    return -0.5 / x - 0.25 + (10.0 / (7.0 * x * x)) / (1.0 - 10.0 / (7.0 * x))


def _log_phi_inv(target: float) -> float:
    """x with ln phi(x) = target, bisection then Newton to 1e-9 absolute."""
    if target >= log_phi(_X_LO):
        return _X_LO
    lo, hi = _X_LO, _X_HI
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if log_phi(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, lo):
            break
    x = 0.5 * (lo + hi)
    for _ in range(4):
        step = (log_phi(x) - target) / _dlogphi(x)
        x_new = x - step
        if not (lo * 0.5 <= x_new <= hi * 2.0) or x_new <= 0:
            break
        x = x_new
        if abs(step) < 1e-12 * max(1.0, x):
            break
    return x


def phi_inv(y: float) -> float:
    """Inverse of phi; accepts y in (0, phi(0+)]."""
    if y <= 0.0:
        raise ValueError("phi_inv needs y > 0")
    return _log_phi_inv(math.log(y))


def _check_update(mu: float) -> float:
    """mu -> phiinv(1 - (1 - phi(mu))^2), evaluated in the log domain."""
    lp = log_phi(mu)
    if lp > -30.0:
        t = math.exp(lp)
        ln_u = lp + math.log(2.0 - t)
    else:
        ln_u = math.log(2.0) + lp
    return _log_phi_inv(ln_u)


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-synthetic-channel equivalent noise variances plus, once a code is
    attached, the message-bit LLR Gaussian parameters mu_L / var_L."""

    n: int
    sigma2_channel: float
    sigma2_per_channel: np.ndarray
    design_es_n0_db: float | None = None
    phi_version: str = PHI_VERSION
    mu_L: np.ndarray | None = None
    var_L: np.ndarray | None = None

    def for_code(self, cfg: CodeConfig) -> "ReliabilityProfile":
        if cfg.N != self.sigma2_per_channel.size:
            raise ValueError("profile length does not match code length")
        s2 = self.sigma2_per_channel[cfg.info_idx0]
        mu = 2.0 / s2
        return replace(self, mu_L=mu, var_L=2.0 * mu)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "sigma2_channel": self.sigma2_channel,
            "sigma2_per_channel": self.sigma2_per_channel.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


_cache_lock = threading.Lock()
_profile_cache: dict = {}


def ga_evolve(n: int, sigma2_channel: float, design_es_n0_db=None) -> ReliabilityProfile:
    """Evolve the channel LLR mean 2/sigma^2 through n polarization levels.

    Channel 2j-1 of a level is the check combination of channel j of the
    previous level and channel 2j the variable combination, matching the
    natural-order decoder recursion. Results are cached per
    (n, sigma2, phi version); the returned profile is immutable.
    """
    if not sigma2_channel > 0.0:
        raise ValueError("channel noise variance must be positive")
    key = (n, float(sigma2_channel), PHI_VERSION)
    with _cache_lock:
        hit = _profile_cache.get(key)
    if hit is not None:
        return replace(hit, design_es_n0_db=design_es_n0_db)

    mu = [2.0 / sigma2_channel]
    for _ in range(n):
        nxt = []
        for m in mu:
            nxt.append(_check_update(m))
            nxt.append(2.0 * m)
        mu = nxt
    mu_arr = np.asarray(mu, dtype=np.float64)
    s2 = 2.0 / mu_arr
    s2.setflags(write=False)
    prof = ReliabilityProfile(
        n=n,
        sigma2_channel=float(sigma2_channel),
        sigma2_per_channel=s2,
        design_es_n0_db=design_es_n0_db,
    )
    with _cache_lock:
        _profile_cache[key] = prof
    return prof


def bit_error_prob(profile: ReliabilityProfile, k: int) -> float:
    """P(L_k < 0) = Q(mu_Lk / sigma_Lk) for message index k (1-based)."""
    from .bounds import q_func

    if profile.mu_L is None:
        raise ValueError("profile has no code attached; call for_code(cfg) first")
    if not 1 <= k <= profile.mu_L.size:
        raise IndexError(f"message index {k} out of range")
    mu = profile.mu_L[k - 1]
    return float(q_func(mu / math.sqrt(profile.var_L[k - 1])))


def _genie_llrs_allzero(y_llr: np.ndarray) -> np.ndarray:
    """All N decision LLRs of genie-aided SC for all-zero data, batched.

    With every prior decision forced to 0, partial sums vanish and the
    recursion decouples: check-combine the two halves for the first-half
    bits, plain sum for the second half. The check combine here uses the
    tanh product form (sign-exact; magnitudes capped by float atanh),
    deliberately a different code path from the decoder kernels.
    """
    T, width = y_llr.shape
    if width == 1:
        return y_llr
    h = width // 2
    a, b = y_llr[:, :h], y_llr[:, h:]
    prod = np.tanh(a / 2.0) * np.tanh(b / 2.0)
    chk = 2.0 * np.arctanh(np.clip(prod, -1.0 + 1e-16, 1.0 - 1e-16))
    return np.concatenate(
        [_genie_llrs_allzero(chk), _genie_llrs_allzero(a + b)], axis=1
    )


def mc_density_oracle(n, cfg: CodeConfig, sigma2_channel, samples, seed):
    """Empirical P(L_j < 0) per information bit via genie-aided SC.

    Simulates all-zero transmissions and tallies negative decision LLRs
    under correct-prior-decision conditioning. Returns (p_hat, std_err)
    arrays over the K information indices of cfg.
    """
    if samples < 10**5:
        raise ValueError("density oracle needs at least 1e5 samples")
    N = 1 << n
    if cfg.N != N:
        raise ValueError("cfg does not match n")
    rng = np.random.Generator(np.random.Philox(key=seed))
    neg = np.zeros(cfg.K, dtype=np.int64)
    chunk = max(1, min(samples, (1 << 22) // N))
    done = 0
    info = cfg.info_idx0
    while done < samples:
        t = min(chunk, samples - done)
        y = 1.0 + rng.standard_normal((t, N)) * math.sqrt(sigma2_channel)
        llrs = _genie_llrs_allzero(llr_from_y(y, sigma2_channel))
        neg += (llrs[:, info] < 0).sum(axis=0)
        done += t
    p = neg / samples
    se = np.sqrt(np.maximum(p * (1 - p), 1e-12) / samples)
    return p, se
