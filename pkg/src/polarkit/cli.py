"""Command-line front end: construction, bounds, simulation, MWD.

Every output embeds the resolved parameter record and the toolkit
version, so re-running a printed spec reproduces the payload
byte-for-byte (there are no timestamps in the payload). SNR is Es/N0 in
dB everywhere. Exit codes: 0 success, 2 usage, 3 capacity/guard,
4 numerical tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bounds import BoundParams, QuadSettings, lb_scl
from .channel import ChannelParams, snr_to_sigma2
from .construct import bit_swap_construct, ga_construct, weight_init
from .core import CodeConfig
from .decoders import CrcSpec
from .exceptions import CapacityError, IntegrationError
from .reliability import ga_evolve
from .sim import run_bler
from .wdist import ENUM_MAX_K, dmin_lower_via_rows, enumerate_weights, weight_info

EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_NUMERICAL = 4


def _snr_grid(lo, hi, step):
    if step <= 0:
        raise ValueError("--snr-step must be positive")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(max(count, 1))]


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header_lines(spec: dict):
    return [
        f"# polarkit {__version__}",
        "# format 1",
        f"# spec {json.dumps(spec, sort_keys=True)}",
    ]


def _load_code(path) -> CodeConfig:
    with open(path) as fh:
        doc = json.load(fh)
    body = doc.get("code", doc)
    return CodeConfig.from_json_dict(body)


def _json_doc(spec: dict, payload: dict) -> str:
    return json.dumps(
        {"format": 1, "tool": f"polarkit {__version__}", "spec": spec, **payload},
        sort_keys=True,
        indent=2,
    ) + "\n"


def cmd_construct(args, parser):
    spec = {
        "command": "construct",
        "n": args.n,
        "k": args.k,
        "method": args.method,
        "list": args.list,
        "snr_db": args.snr_db,
    }
    if args.method == "bs":
        if args.list is None:
            parser.error("--method bs requires --list")
        res = bit_swap_construct(
            args.n, args.k, args.list, args.snr_db, a_dmin_override=args.a_dmin
        )
        cfg = res.config
        payload = {
            "code": cfg.to_json_dict(),
            "bound_report": res.report.to_json_dict(),
        }
        if args.out:
            log_path = args.out + ".swaplog.jsonl"
            with open(log_path, "w", newline="") as fh:
                for ev in res.swap_log:
                    fh.write(ev.to_json() + "\n")
            payload["swap_log_file"] = log_path
        else:
            payload["swap_log"] = [json.loads(ev.to_json()) for ev in res.swap_log]
    else:
        builder = {"ga": ga_construct, "weight": weight_init}[args.method]
        cfg = builder(args.n, args.k, args.snr_db)
        payload = {"code": cfg.to_json_dict()}
    _emit(_json_doc(spec, payload), args.out)
    return 0


def cmd_bound(args, parser):
    cfg = _load_code(args.code)
    alpha = None if args.discard_alpha or args.alpha is None else args.alpha
    spec = {
        "command": "bound",
        "code": cfg.to_json_dict(),
        "list": args.list,
        "snr_from": args.snr_from,
        "snr_to": args.snr_to,
        "snr_step": args.snr_step,
        "alpha": alpha,
        "a_dmin": args.a_dmin,
        "full_union": args.full_union,
    }
    params = BoundParams(L=args.list, alpha=alpha)
    if cfg.K > ENUM_MAX_K and args.a_dmin is None:
        raise CapacityError(
            f"K={cfg.K} > {ENUM_MAX_K}: exact A_dmin enumeration is out of reach "
            "at this size; pass --a-dmin explicitly"
        )
    wd = weight_info(cfg, a_dmin_override=args.a_dmin)
    settings = QuadSettings()
    cache: dict = {}
    rows = []
    reports = []
    for db in _snr_grid(args.snr_from, args.snr_to, args.snr_step):
        profile = ga_evolve(cfg.n, snr_to_sigma2(db), db).for_code(cfg)
        rep = lb_scl(
            profile, cfg, params, wd, db, settings,
            window_cache=cache, full_union=args.full_union,
        )
        reports.append(rep)
        rows.append(
            ",".join(
                repr(float(v))
                for v in (db, rep.p_ml, rep.p_lb_scl, rep.p_sc_modified, rep.p_sc_classic)
            )
        )
    if args.json:
        payload = {"reports": [r.to_json_dict() for r in reports]}
        _emit(_json_doc(spec, payload), args.out)
    else:
        lines = _header_lines(spec)
        lines.append("es_n0_db,p_ml,p_lb_scl,p_sc_modified,p_sc_classic")
        lines.extend(rows)
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args, parser):
    crc_spec = None
    if args.decoder == "cascl":
        if args.crc_poly is None or args.crc_len is None:
            parser.error("--decoder cascl requires --crc-poly and --crc-len")
        crc_spec = CrcSpec.from_int(int(args.crc_poly, 16), args.crc_len)
    cfg = _load_code(args.code)
    spec = {
        "command": "simulate",
        "code": cfg.to_json_dict(),
        "decoder": args.decoder,
        "list": args.list,
        "crc_poly": args.crc_poly,
        "crc_len": args.crc_len,
        "snr_from": args.snr_from,
        "snr_to": args.snr_to,
        "snr_step": args.snr_step,
        "trials": args.trials,
        "stop_errors": args.stop_errors,
        "seed": args.seed,
        "all_zero": args.all_zero,
    }
    rows = []
    reports = []
    for db in _snr_grid(args.snr_from, args.snr_to, args.snr_step):
        rep = run_bler(
            cfg,
            args.decoder,
            args.list,
            ChannelParams(es_n0_db=db, seed=args.seed),
            trials=args.trials,
            stop_at_errors=args.stop_errors,
            seed=args.seed,
            all_zero=args.all_zero,
            crc_spec=crc_spec,
            threads=args.threads,
        )
        reports.append(rep)
        rows.append(
            ",".join(
                repr(float(v))
                for v in (
                    db, rep.bler, rep.pl_rate, rep.ps_rate,
                    rep.wilson_ci95[0], rep.wilson_ci95[1],
                )
            )
            + f",{rep.trials}"
        )
    if args.json:
        payload = {"reports": [r.to_json_dict() for r in reports]}
        _emit(_json_doc(spec, payload), args.out)
    else:
        lines = _header_lines(spec)
        lines.append("es_n0_db,bler,pl_rate,ps_rate,ci_lo,ci_hi,trials")
        lines.extend(rows)
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_mwd(args, parser):
    cfg = _load_code(args.code)
    spec = {"command": "mwd", "code": cfg.to_json_dict()}
    if cfg.K <= ENUM_MAX_K:
        wd = enumerate_weights(cfg)
        payload = {
            "spectrum": {str(w): c for w, c in sorted(wd.spectrum.items())},
            "dmin": wd.dmin,
            "a_dmin": wd.a_dmin,
            "complete": True,
        }
    else:
        payload = {
            "spectrum": None,
            "dmin": dmin_lower_via_rows(cfg),
            "a_dmin": None,
            "complete": False,
            "warning": f"K={cfg.K} > {ENUM_MAX_K}: dmin from row weights only",
        }
    _emit(_json_doc(spec, payload), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarkit",
        description="Polar-code SCL bounds, construction and simulation "
        "(all SNRs are Es/N0 in dB)",
    )
    parser.add_argument("--version", action="version", version=f"polarkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build an information set")
    p.add_argument("--n", type=int, required=True, help="code length N (power of two)")
    p.add_argument("--k", type=int, required=True, help="information length K")
    p.add_argument("--method", choices=("ga", "weight", "bs"), required=True)
    p.add_argument("--list", type=int, default=None, help="list size (bs only)")
    p.add_argument("--snr-db", type=float, default=2.0, help="design Es/N0 in dB")
    p.add_argument("--a-dmin", type=int, default=None,
                   help="A_dmin override for bs bound evaluation when K > 24")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bound", help="bound curves over an SNR sweep")
    p.add_argument("--code", required=True, help="CodeConfig JSON file")
    p.add_argument("--list", type=int, required=True)
    p.add_argument("--snr-from", type=float, required=True)
    p.add_argument("--snr-to", type=float, required=True)
    p.add_argument("--snr-step", type=float, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float, default=None)
    g.add_argument("--discard-alpha", action="store_true",
                   help="drop the alpha threshold term (default policy)")
    p.add_argument("--a-dmin", type=int, default=None)
    p.add_argument("--full-union", action="store_true",
                   help="union bound over the complete spectrum (K <= 24)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo BLER sweep")
    p.add_argument("--code", required=True)
    p.add_argument("--decoder", choices=("sc", "scl", "cascl", "ml"), required=True)
    p.add_argument("--list", type=int, default=1)
    p.add_argument("--crc-poly", default=None, help="hex generator, r low coefficients")
    p.add_argument("--crc-len", type=int, default=None)
    p.add_argument("--snr-from", type=float, required=True)
    p.add_argument("--snr-to", type=float, required=True)
    p.add_argument("--snr-step", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--stop-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--all-zero", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mwd", help="weight spectrum / dmin of a code")
    p.add_argument("--code", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mwd)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except CapacityError as exc:
        print(f"polarkit: capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except IntegrationError as exc:
        print(
            f"polarkit: numerical tolerance: {exc} "
            f"(achieved estimate {exc.error_estimate})",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
