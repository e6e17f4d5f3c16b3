"""Block-error-rate bounds for SC and fixed-list SCL decoding.

Everything is evaluated under the Gaussian model of the message-bit
LLRs L_k ~ N(mu_k, 2*mu_k) supplied by a code-attached
ReliabilityProfile, with independence across k. Conventions shared by
every function here (so structural identities hold bit-exactly):

    P(L_k >= 0) = q_func(-mu_k/sigma_k)
    P(L_k <  0) = 1 - P(L_k >= 0)

The list-decoding lower bound combines, per message position k, an upper
bound on the probability that the all-zero path stays in the list when
the survivor set has collapsed onto the 2^m extensions of the all-zero
prefix. That bound has three parts: the all-signs-positive mass, m
boundary integrals over the positive orthant, and an alpha-threshold
term for the sign-flip of L_{k-m} (dropping alpha relaxes it to the
plain negative-sign mass).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special as sps

from .core import CodeConfig
from .exceptions import IntegrationError
from .reliability import ReliabilityProfile
from .wdist import WeightEnumerator

__all__ = [
    "DISCARD",
    "BoundParams",
    "BoundReport",
    "QuadSettings",
    "integrate_positive_orthant",
    "lb_scl",
    "pck_upper_bound",
    "q_func",
    "sc_upper_bound_classic",
    "sc_upper_bound_modified",
    "union_bound",
    "union_bound_full",
]

#: Sentinel for "discard the alpha term" (use P(L_{k-m} < 0) as part 3).
DISCARD = None


def q_func(x):
    """Gaussian tail probability Q(x), accurate over the full float64 range."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(sps.log_ndtr(-x))
    return out if out.ndim else float(out)


def union_bound(dmin: int, a_dmin: int, es_n0_db: float) -> float:
    """Minimum-weight-term union bound on the ML block error rate."""
    if dmin < 1 or a_dmin < 1:
        raise ValueError("union bound needs dmin >= 1 and a_dmin >= 1")
    esn0 = 10.0 ** (es_n0_db / 10.0)
    return min(1.0, a_dmin * q_func(math.sqrt(2.0 * dmin * esn0)))


def union_bound_full(spectrum: dict, es_n0_db: float) -> float:
    """Union bound over a complete weight spectrum."""
    esn0 = 10.0 ** (es_n0_db / 10.0)
    total = sum(
        c * q_func(math.sqrt(2.0 * w * esn0)) for w, c in spectrum.items() if w > 0
    )
    return min(1.0, float(total))


def _pos_neg_probs(profile: ReliabilityProfile):
    if profile.mu_L is None:
        raise ValueError("profile has no code attached; call for_code(cfg) first")
    mu = profile.mu_L
    sig = np.sqrt(profile.var_L)
    p_pos = q_func(-mu / sig)
    return mu, sig, p_pos, 1.0 - p_pos


def sc_upper_bound_classic(profile: ReliabilityProfile) -> float:
    """Sum of per-bit error probabilities (the plain first-error union)."""
    mu, sig, _, _ = _pos_neg_probs(profile)
    return min(1.0, float(np.sum(q_func(mu / sig))))


def sc_upper_bound_modified(profile: ReliabilityProfile) -> float:
    """First-error sum with the prior-bits-correct factor:
    sum_k P(L_k < 0) prod_{j<k} P(L_j >= 0). Always <= the classic bound."""
    _, _, p_pos, p_neg = _pos_neg_probs(profile)
    pref = np.concatenate([[1.0], np.cumprod(p_pos)])
    total = 0.0
    for k in range(p_pos.size):
        total += p_neg[k] * pref[k]
    return float(min(1.0, total))


@dataclass(frozen=True)
class QuadSettings:
    """Numerical integration knobs for the orthant integrals."""

    nodes: int = 64
    trunc_sigmas: float = 10.0
    rtol: float = 1e-6
    atol: float = 1e-9
    mc_samples: int = 10**6
    mc_seed: int = 20260810
    method: str = "auto"  # auto | quadrature | mc


@dataclass(frozen=True)
class BoundParams:
    """List size L = 2^m and the alpha policy for the threshold term."""

    L: int
    alpha: float | None = DISCARD
    m: int = field(init=False)

    def __post_init__(self):
        if self.L < 1 or (self.L & (self.L - 1)) != 0:
            raise ValueError(f"list size must be a power of two, got {self.L}")
        if self.alpha is not None and not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1] or be DISCARD")
        object.__setattr__(self, "m", self.L.bit_length() - 1)


def _gauss_legendre_grid(mu, sig, nodes, trunc_sigmas):
    """Tensor-product GL nodes on [0, mu_j + t*sig_j] with folded weights."""
    axes, wts = [], []
    for m, s in zip(mu, sig):
        hi = m + trunc_sigmas * s
        x, w = np.polynomial.legendre.leggauss(nodes)
        x = 0.5 * hi * (x + 1.0)
        w = 0.5 * hi * w
        pdf = np.exp(-0.5 * ((x - m) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        axes.append(x)
        wts.append(w * pdf)
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wt = wts[0]
    for w in wts[1:]:
        wt = np.multiply.outer(wt, w)
    return pts, wt.ravel()


def integrate_positive_orthant(f, mu, sig, settings: QuadSettings | None = None):
    """Integral of f(l) * prod_j p(l_j) over the positive orthant.

    ``f`` maps an (S, d) point array to S values; ``mu``/``sig`` give the
    independent Gaussian factors p(l_j). Dimensions <= 3 use tensor
    Gauss-Legendre with a node-doubling error estimate (raises
    IntegrationError when the tolerance is missed); higher dimensions
    (or method="mc") use Latin-hypercube Monte Carlo over the truncated
    Gaussians, returning the standard error as the estimate.
    """
    settings = settings or QuadSettings()
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    sig = np.atleast_1d(np.asarray(sig, dtype=np.float64))
    d = mu.size
    use_quad = settings.method == "quadrature" or (
        settings.method == "auto" and d <= 3
    )
    if use_quad:
        vals = []
        for nodes in (settings.nodes, 2 * settings.nodes):
            pts, wt = _gauss_legendre_grid(mu, sig, nodes, settings.trunc_sigmas)
            vals.append(float(np.dot(f(pts), wt)))
        err = abs(vals[1] - vals[0])
        if err > max(settings.atol, settings.rtol * abs(vals[1])):
            raise IntegrationError(
                f"quadrature error estimate {err:.3e} exceeds tolerance",
                value=vals[1],
                error_estimate=err,
            )
        return vals[1], err

    # Latin-hypercube sampling of the truncated-to-positive Gaussians
    rng = np.random.Generator(np.random.Philox(key=settings.mc_seed))
    S = settings.mc_samples
    p0 = sps.ndtr(-mu / sig)  # P(L_j < 0)
    mass = float(np.prod(1.0 - p0))
    u = np.empty((S, d))
    for j in range(d):
        u[:, j] = (rng.permutation(S) + rng.random(S)) / S
    pts = mu + sig * sps.ndtri(p0 + u * (1.0 - p0))
    np.clip(pts, 0.0, None, out=pts)
    fv = f(pts)
    value = mass * float(np.mean(fv))
    se = mass * float(np.std(fv)) / math.sqrt(S)
    return value, se


def _part2_integrand(L, d, mu_t, sig_t, q_at_zero):
    """Q((-ln beta - mu_t)/sig_t) - Q(-mu_t/sig_t), floored at zero.

    beta = L e^{l_0} / prod_{c>=1} (e^{-l_c} + 1) - 1 evaluated in the log
    domain; on the positive orthant beta >= 1, so -ln(beta) <= 0.
    """

    def f(pts):
        a = math.log(L) + pts[:, 0]
        for c in range(1, d):
            a = a - np.log1p(np.exp(-pts[:, c]))
        neg_ln_beta = -(a + np.log1p(-np.clip(np.exp(-a), 0.0, 1.0 - 1e-16)))
        qd = q_func((neg_ln_beta - mu_t) / sig_t) - q_at_zero
        return np.maximum(qd, 0.0)

    return f


def pck_upper_bound(
    k: int,
    profile: ReliabilityProfile,
    params: BoundParams,
    settings: QuadSettings | None = None,
    with_diagnostics: bool = False,
):
    """Upper bound on the correct-path-retention probability at message
    position k (1-based), for list size L = 2^m. Needs k >= m + 1."""
    settings = settings or QuadSettings()
    mu_all, sig_all, _, _ = _pos_neg_probs(profile)
    m = params.m
    if k < m + 1:
        raise ValueError(f"position k={k} needs k >= m+1 = {m + 1}")
    if k > mu_all.size:
        raise IndexError(f"position k={k} beyond K={mu_all.size}")
    # local j = 0..m maps to message index k-m+j
    mu = mu_all[k - m - 1 : k]
    sig = sig_all[k - m - 1 : k]

    part1 = float(np.prod(q_func(-mu / sig)))

    part2 = 0.0
    part2_terms = []
    err = 0.0
    for i in range(1, m + 1):
        d = m - i + 1  # integration variables l_{k-m} .. l_{k-i}
        t = d  # local index of the bounded coordinate l_{k-i+1}
        q_at_zero = q_func(-mu[t] / sig[t])
        f = _part2_integrand(params.L, d, mu[t], sig[t], q_at_zero)
        val, e = integrate_positive_orthant(f, mu[:d], sig[:d], settings)
        part2_terms.append(max(0.0, val))
        part2 += max(0.0, val)
        err += e

    if m == 0:
        part3 = 0.0  # alpha = 1 structurally: the threshold interval is empty
    elif params.alpha is DISCARD:
        part3 = float(1.0 - q_func(-mu[0] / sig[0]))
    else:
        part3 = max(
            0.0,
            q_func((math.log(params.alpha) - mu[0]) / sig[0])
            - q_func(-mu[0] / sig[0]),
        )

    total = float(min(1.0, max(0.0, part1 + part2 + part3)))
    if with_diagnostics:
        return total, {
            "part1": part1,
            "part2": part2,
            "part2_terms": part2_terms,
            "part3": part3,
            "integration_error": err,
        }
    return total


@dataclass(frozen=True)
class BoundReport:
    """All bound values at one SNR point."""

    es_n0_db: float
    p_ml: float
    p_s_terms: np.ndarray  # per-k lower-bound terms, k = m+1..K
    p_ub_ck: np.ndarray  # per-k retention upper bounds, k = m+1..K
    p_lb_scl: float
    p_sc_modified: float
    p_sc_classic: float
    diagnostics: dict

    def to_json_dict(self) -> dict:
        return {
            "es_n0_db": self.es_n0_db,
            "p_ml": self.p_ml,
            "p_lb_scl": self.p_lb_scl,
            "p_sc_modified": self.p_sc_modified,
            "p_sc_classic": self.p_sc_classic,
            "p_s_terms": self.p_s_terms.tolist(),
            "p_ub_ck": self.p_ub_ck.tolist(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def lb_scl(
    profile: ReliabilityProfile,
    cfg: CodeConfig,
    params: BoundParams,
    wd: WeightEnumerator,
    es_n0_db: float,
    settings: QuadSettings | None = None,
    window_cache: dict | None = None,
    full_union: bool = False,
) -> BoundReport:
    """Approximate lower bound on the SCL block error rate.

    P_LB = sum_{k=m+1}^K (1 - P_UB(C_k)) prod_{j<=k-m-1} P(L_j >= 0) + P_ML.
    With L = 1 the sum reduces exactly to the modified SC upper bound.
    ``window_cache`` memoizes P_UB(C_k) on the (mu window, L, alpha) key so
    construction sweeps that move few positions stay cheap.
    """
    settings = settings or QuadSettings()
    if profile.mu_L is None:
        profile = profile.for_code(cfg)
    mu, sig, p_pos, p_neg = _pos_neg_probs(profile)
    K = mu.size
    m = params.m

    if full_union:
        if not (wd.complete and wd.spectrum):
            raise ValueError("full union bound needs a complete spectrum")
        p_ml = union_bound_full(wd.spectrum, es_n0_db)
    else:
        p_ml = union_bound(wd.dmin, wd.a_dmin, es_n0_db)

    pref = np.concatenate([[1.0], np.cumprod(p_pos)])  # pref[j] = prod_{t<=j}
    terms, pcks = [], []
    pl_sum = 0.0  # summed sequentially, matching sc_upper_bound_modified
    err_total = 0.0
    for k in range(m + 1, K + 1):
        key = (params.L, params.alpha, settings.nodes, tuple(mu[k - m - 1 : k]))
        hit = window_cache.get(key) if window_cache is not None else None
        if hit is None:
            hit = pck_upper_bound(k, profile, params, settings, with_diagnostics=True)
            if window_cache is not None:
                window_cache[key] = hit
        pck, diag = hit
        err_total += diag["integration_error"]
        pcks.append(pck)
        term = float((1.0 - pck) * pref[k - m - 1])
        terms.append(term)
        pl_sum += term

    p_lb = float(min(1.0, max(0.0, pl_sum + p_ml)))
    return BoundReport(
        es_n0_db=es_n0_db,
        p_ml=p_ml,
        p_s_terms=np.asarray(terms),
        p_ub_ck=np.asarray(pcks),
        p_lb_scl=p_lb,
        p_sc_modified=sc_upper_bound_modified(profile),
        p_sc_classic=sc_upper_bound_classic(profile),
        diagnostics={"integration_error_total": err_total, "list_size": params.L},
    )
