"""Information-set construction: GA ordering, row-weight initialization,
and the greedy bit-swapping search that minimizes the SCL lower bound.

The row-weight initializer stands in for an externally published
minimum-weight-distribution ordering: it keeps the same driving property
(best ML performance, weaker path-loss behaviour) by ranking positions
by descending generator-row weight with GA reliability as tie-break.
``from_sequence`` loads an externally supplied ordering when one is
available.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bounds import BoundParams, BoundReport, QuadSettings, lb_scl
from .channel import snr_to_sigma2
from .core import CodeConfig, row_weight
from .reliability import ga_evolve
from .wdist import weight_info

__all__ = [
    "BitSwapResult",
    "SwapEvent",
    "WeightPartition",
    "bit_swap_construct",
    "from_sequence",
    "ga_construct",
    "partition_by_weight",
    "weight_init",
]


@dataclass(frozen=True)
class WeightPartition:
    """Subsets B_0..B_n with B_r = {i : w(g_i) = 2^(n-r)}."""

    subsets: tuple  # tuple of frozensets, index r = 0..n


def partition_by_weight(n: int) -> WeightPartition:
    N = 1 << n
    subsets = [set() for _ in range(n + 1)]
    for i in range(1, N + 1):
        r = n - int(bin(i - 1).count("1"))
        subsets[r].add(i)
    return WeightPartition(subsets=tuple(frozenset(s) for s in subsets))


def _validate_sizes(N: int, K: int):
    if N < 1 or (N & (N - 1)) != 0:
        raise ValueError(f"N must be a power of two, got {N}")
    if not 1 <= K <= N:
        raise ValueError(f"K must lie in 1..{N}, got {K}")


def ga_construct(N: int, K: int, es_n0_db: float) -> CodeConfig:
    """The K most reliable synthetic channels under GA (ties to lower index)."""
    _validate_sizes(N, K)
    n = N.bit_length() - 1
    s2 = ga_evolve(n, snr_to_sigma2(es_n0_db), es_n0_db).sigma2_per_channel
    order = sorted(range(1, N + 1), key=lambda i: (s2[i - 1], i))
    return CodeConfig.from_info_set(N, order[:K])


def weight_init(N: int, K: int, es_n0_db: float) -> CodeConfig:
    """Row-weight-first initialization: descending w(g_i), ties by GA
    reliability then by the larger index."""
    _validate_sizes(N, K)
    n = N.bit_length() - 1
    s2 = ga_evolve(n, snr_to_sigma2(es_n0_db), es_n0_db).sigma2_per_channel
    order = sorted(
        range(1, N + 1), key=lambda i: (-row_weight(i, n), s2[i - 1], -i)
    )
    return CodeConfig.from_info_set(N, order[:K])


def from_sequence(N: int, K: int, sequence) -> CodeConfig:
    """Information set from the first K entries of an externally supplied
    reliability/MWD ordering (1-based indices, most important first)."""
    _validate_sizes(N, K)
    seq = [int(i) for i in sequence]
    if sorted(seq) != list(range(1, N + 1)):
        raise ValueError("sequence must be a permutation of 1..N")
    return CodeConfig.from_info_set(N, seq[:K])


@dataclass(frozen=True)
class SwapEvent:
    """One attempted swap: candidate bound vs incumbent, and the verdict."""

    range_a: int
    range_b: int
    i_max: int
    i_min: int
    sigma2_max: float
    sigma2_min: float
    candidate_plb: float
    incumbent_plb: float
    accepted: bool

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


@dataclass(frozen=True)
class BitSwapResult:
    config: CodeConfig
    report: BoundReport
    swap_log: tuple


def bit_swap_construct(
    N: int,
    K: int,
    L: int,
    es_n0_db: float,
    alpha=None,
    settings: QuadSettings | None = None,
    a_dmin_override=None,
    a_dmin_mode: str = "rows",
    search_list_size: int = 4096,
) -> BitSwapResult:
    """Greedy bit swapping: start from the row-weight initialization and
    repeatedly swap the least-reliable information bit against the
    most-reliable frozen bit inside a growing row-weight band, keeping a
    swap only when it strictly lowers the SCL lower bound.

    Swap candidates advance through the scratch set even when rejected,
    so the search explores past an uphill move; the accepted set A only
    ever improves. The band [a, b] starts at the weight boundary of the
    initial A and widens one class on each side until it covers B_0..B_n.

    For K > 24 the per-candidate A_dmin is approximate: ``a_dmin_mode``
    "rows" counts weight-d_min rows (cheap, undercounts), "search" runs
    the noiseless large-list enumeration per candidate (slower, far
    closer to the truth, so d_min-reducing swaps are priced realistically).
    """
    _validate_sizes(N, K)
    if a_dmin_mode not in ("rows", "search"):
        raise ValueError("a_dmin_mode must be 'rows' or 'search'")
    params = BoundParams(L=L, alpha=alpha)
    settings = settings or QuadSettings()
    n = N.bit_length() - 1
    profile = ga_evolve(n, snr_to_sigma2(es_n0_db), es_n0_db)
    s2 = profile.sigma2_per_channel

    window_cache: dict = {}
    lb_cache: dict = {}

    def wd_for(cfg: CodeConfig):
        if a_dmin_override is not None or cfg.K <= 24 or a_dmin_mode == "rows":
            return weight_info(cfg, a_dmin_override=a_dmin_override, allow_approx=True)
        from .wdist import WeightEnumerator, min_weight_search_scl

        est = min_weight_search_scl(cfg, search_list_size)
        return WeightEnumerator(dmin=est.dmin, a_dmin=est.a_dmin, complete=False)

    def evaluate(A) -> BoundReport:
        key = tuple(sorted(A))
        hit = lb_cache.get(key)
        if hit is None:
            cfg = CodeConfig.from_info_set(N, A)
            hit = lb_scl(
                profile.for_code(cfg),
                cfg,
                params,
                wd_for(cfg),
                es_n0_db,
                settings,
                window_cache=window_cache,
            )
            lb_cache[key] = hit
        return hit

    cfg0 = weight_init(N, K, es_n0_db)
    A = set(cfg0.A)
    report = evaluate(A)
    plb = report.p_lb_scl
    swap_log: list[SwapEvent] = []

    part = partition_by_weight(n).subsets
    c = max(r for r in range(n + 1) if A & part[r])
    a, b = max(c - 1, 0), c

    while True:
        A_tilde = set(A)
        band = set().union(*part[a : b + 1])
        sigma2_max, sigma2_min = np.inf, 0.0
        while sigma2_max > sigma2_min:
            info_band = A_tilde & band
            frozen_band = band - info_band
            if not info_band or not frozen_band:
                break
            i_max = max(info_band, key=lambda i: (s2[i - 1], -i))
            i_min = min(frozen_band, key=lambda i: (s2[i - 1], i))
            sigma2_max = s2[i_max - 1]
            sigma2_min = s2[i_min - 1]
            A_tilde = (A_tilde - {i_max}) | {i_min}
            cand = evaluate(A_tilde)
            accepted = cand.p_lb_scl < plb
            swap_log.append(
                SwapEvent(
                    range_a=a,
                    range_b=b,
                    i_max=i_max,
                    i_min=i_min,
                    sigma2_max=float(sigma2_max),
                    sigma2_min=float(sigma2_min),
                    candidate_plb=cand.p_lb_scl,
                    incumbent_plb=plb,
                    accepted=accepted,
                )
            )
            if accepted:
                A = set(A_tilde)
                report, plb = cand, cand.p_lb_scl
        if a == 0 and b == n:
            break
        a, b = max(a - 1, 0), min(b + 1, n)

    return BitSwapResult(
        config=CodeConfig.from_info_set(N, A),
        report=report,
        swap_log=tuple(swap_log),
    )
