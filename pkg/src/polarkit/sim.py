"""Monte Carlo BLER harness with path-loss / path-selection bookkeeping.

Every trial t draws from its own counter-split RNG stream
(``Philox(key=seed, counter=t << 128)``): first the K message bits, then
the N noise samples. Early stopping therefore never changes per-trial
outcomes, and chunked parallel execution reproduces the serial run
bit-for-bit. With ``all_zero`` the message draw is still consumed so the
noise realizations match the random-message run on the same seed.

Block errors of list decoders are classified exactly once per trial:
PL when the transmitted path fell out of the survivor set (the step is
recorded), PS when it survived to the end but was not selected.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import ChannelParams, transmit, trial_rng
from .core import CodeConfig, embed_message
from .decoders import (
    CrcSpec,
    PathList,
    PathTrace,
    ca_scl_decode,
    crc_attach,
    ml_codebook,
    ml_decode_bruteforce,
    scl_decode,
)
from .exceptions import CapacityError

__all__ = [
    "DECODER_KINDS",
    "SimReport",
    "classify_error",
    "estimate_ml_bler",
    "paired_ml_audit",
    "run_bler",
    "wilson_ci",
]

DECODER_KINDS = ("sc", "scl", "cascl", "ml")


def wilson_ci(errors: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return (float(max(0.0, center - half)), float(min(1.0, center + half)))


@dataclass(frozen=True)
class SimReport:
    """Outcome counts of one Monte Carlo run at a single SNR point."""

    trials: int
    block_errors: int
    pl_errors: int
    ps_errors: int
    bler: float
    pl_rate: float
    ps_rate: float
    wilson_ci95: tuple
    seed: int
    decoder_kind: str
    es_n0_db: float
    elapsed_seconds: float
    list_size: int = 1
    pl_first_loss_hist: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        d = {
            "trials": self.trials,
            "block_errors": self.block_errors,
            "pl_errors": self.pl_errors,
            "ps_errors": self.ps_errors,
            "bler": self.bler,
            "pl_rate": self.pl_rate,
            "ps_rate": self.ps_rate,
            "ci_lo": self.wilson_ci95[0],
            "ci_hi": self.wilson_ci95[1],
            "seed": self.seed,
            "decoder_kind": self.decoder_kind,
            "es_n0_db": self.es_n0_db,
            "list_size": self.list_size,
            "pl_first_loss_hist": {str(k): v for k, v in self.pl_first_loss_hist.items()},
        }
        return d


def classify_error(trace: PathTrace, final_list: PathList, transmitted_u, selected):
    """\"PS\" when the transmitted path is in the final list, else \"PL\".

    Only meaningful on error trials; calling it when selected equals the
    transmitted u-vector is a contract violation.
    """
    if np.array_equal(np.asarray(selected), np.asarray(transmitted_u)):
        raise ValueError("classify_error called on a non-error trial")
    return "PS" if trace.ref_in_final_list else "PL"


def _draw_message(rng, cfg: CodeConfig, all_zero: bool, crc_spec):
    draw = rng.integers(0, 2, cfg.K).astype(np.uint8)
    if all_zero:
        return np.zeros(cfg.K, dtype=np.uint8)
    if crc_spec is not None:
        return crc_attach(draw[: cfg.K - crc_spec.r], crc_spec)
    return draw


def _run_trial(t, cfg, kind, L, params, seed, all_zero, crc_spec, codebook):
    """One trial: (is_error, is_pl, first_loss_step)."""
    rng = trial_rng(seed, t)
    v = _draw_message(rng, cfg, all_zero, crc_spec if kind == "cascl" else None)
    u = embed_message(v, cfg)
    x = kernels.polar_encode(u)
    llr = transmit(x, params, rng)

    if kind == "sc":
        sel = kernels.sc_decode(llr, cfg.frozen_mask)
        return (not np.array_equal(sel, u), False, -1)
    if kind == "ml":
        sel = ml_decode_bruteforce(llr, cfg, codebook)
        return (not np.array_equal(sel, u), False, -1)
    if kind == "scl":
        sel, plist, trace = scl_decode(llr, cfg, L, ref_u=u)
    elif kind == "cascl":
        sel, plist, trace = ca_scl_decode(llr, cfg, L, crc_spec, ref_u=u)
    else:
        raise ValueError(f"unknown decoder kind {kind!r}")
    if np.array_equal(sel, u):
        return (False, False, -1)
    is_pl = classify_error(trace, plist, u, sel) == "PL"
    return (True, is_pl, trace.first_loss_step if is_pl else -1)


def _trial_chunk(args):
    t0, t1, cfg, kind, L, params, seed, all_zero, crc_spec = args
    codebook = ml_codebook(cfg) if kind == "ml" else None
    return [
        _run_trial(t, cfg, kind, L, params, seed, all_zero, crc_spec, codebook)
        for t in range(t0, t1)
    ]


def run_bler(
    cfg: CodeConfig,
    decoder_kind: str,
    L: int,
    params: ChannelParams,
    trials: int,
    stop_at_errors: int = 100,
    seed=None,
    all_zero: bool = False,
    crc_spec: CrcSpec | None = None,
    threads: int = 1,
) -> SimReport:
    """Simulate up to ``trials`` transmissions, stopping once
    ``stop_at_errors`` block errors have accumulated (0 disables early
    stop). Deterministic for a given seed regardless of threads."""
    if decoder_kind not in DECODER_KINDS:
        raise ValueError(f"decoder kind must be one of {DECODER_KINDS}")
    if decoder_kind == "cascl" and crc_spec is None:
        raise ValueError("cascl needs a CrcSpec")
    if decoder_kind == "ml" and cfg.K > 24:
        raise CapacityError(f"ML simulation guard: K={cfg.K} > 24")
    if trials < 1:
        raise ValueError("need at least one trial")
    seed = int(params.seed if seed is None else seed)

    start = time.perf_counter()
    n_err = n_pl = n_ps = 0
    hist: dict = {}
    done = 0

    def absorb(outcome) -> bool:
        nonlocal n_err, n_pl, n_ps, done
        err, is_pl, fl = outcome
        done += 1
        if err:
            n_err += 1
            if decoder_kind in ("scl", "cascl"):
                if is_pl:
                    n_pl += 1
                    hist[fl] = hist.get(fl, 0) + 1
                else:
                    n_ps += 1
        return stop_at_errors > 0 and n_err >= stop_at_errors

    if threads <= 1:
        codebook = ml_codebook(cfg) if decoder_kind == "ml" else None
        for t in range(trials):
            if absorb(
                _run_trial(
                    t, cfg, decoder_kind, L, params, seed, all_zero,
                    crc_spec, codebook,
                )
            ):
                break
    else:
        chunk = 512
        starts = list(range(0, trials, chunk))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _trial_chunk,
                    (t0, min(t0 + chunk, trials), cfg, decoder_kind, L, params,
                     seed, all_zero, crc_spec),
                )
                for t0 in starts
            ]
            stopped = False
            for fut in futures:
                if stopped:
                    fut.cancel()
                    continue
                for outcome in fut.result():
                    if absorb(outcome):
                        stopped = True
                        break

    elapsed = time.perf_counter() - start
    bler = n_err / done
    return SimReport(
        trials=done,
        block_errors=n_err,
        pl_errors=n_pl,
        ps_errors=n_ps,
        bler=bler,
        pl_rate=n_pl / done,
        ps_rate=n_ps / done,
        wilson_ci95=wilson_ci(n_err, done),
        seed=seed,
        decoder_kind=decoder_kind,
        es_n0_db=params.es_n0_db,
        elapsed_seconds=elapsed,
        list_size=L if decoder_kind in ("scl", "cascl") else 1,
        pl_first_loss_hist=hist,
    )


def estimate_ml_bler(
    cfg: CodeConfig,
    params: ChannelParams,
    trials: int,
    seed=None,
    stop_at_errors: int = 0,
    all_zero: bool = False,
) -> SimReport:
    """Brute-force ML over the same per-trial streams as run_bler, so a
    shared seed gives paired noise realizations."""
    return run_bler(
        cfg, "ml", 1, params, trials,
        stop_at_errors=stop_at_errors, seed=seed, all_zero=all_zero,
    )


def paired_ml_audit(cfg, L, params, trials, seed, all_zero=False):
    """Per-trial audit of PS-implies-ML-error on shared noise.

    Returns (scl_errors, ps_errors, ml_errors, violations) where a
    violation is a PS-error trial on which ML decoded correctly AND the
    selected codeword does not outrank the transmitted one in exact
    likelihood.
    """
    codebook = ml_codebook(cfg)
    scl_err = ps_err = ml_err = violations = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        v = _draw_message(rng, cfg, all_zero, None)
        u = embed_message(v, cfg)
        x = kernels.polar_encode(u)
        llr = transmit(x, params, rng)
        sel, plist, trace = scl_decode(llr, cfg, L, ref_u=u)
        ml = ml_decode_bruteforce(llr, cfg, codebook)
        ml_bad = not np.array_equal(ml, u)
        ml_err += ml_bad
        if np.array_equal(sel, u):
            continue
        scl_err += 1
        if classify_error(trace, plist, u, sel) == "PS":
            ps_err += 1
            corr_sel = float((1.0 - 2.0 * kernels.polar_encode(sel)) @ llr)
            corr_tx = float((1.0 - 2.0 * x.astype(np.float64)) @ llr)
            if not ml_bad and corr_sel < corr_tx - 1e-9:
                violations += 1
    return scl_err, ps_err, ml_err, violations
