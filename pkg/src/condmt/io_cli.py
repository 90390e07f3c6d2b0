"""CSV ingestion, JSON serialization, and the command-line front door.

Subcommands: ``global`` (run a global test on p-values), ``qualint``
(qualitative interaction on a study CSV), ``simulate`` (Monte Carlo
studies), ``scan`` (calibrated scan test), ``serve`` (HTTP session
service).  All results are emitted as JSON on stdout.  Exit codes: 0 on
success, 2 on usage errors, 1 on data errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .adaptive_tau import AdaptiveConfig, auto_select_tau
from .conditional import conditional_test
from .global_tests import METHODS
from .qualint import (
    StudyRecord,
    gail_simon_lrt,
    ibga,
    pool_by_group,
    qualitative_interaction_test,
)
from .scan_test import ScanConfig, scan_test
from .sim_harness import (
    MethodSpec,
    ScenarioConfig,
    equicorr_fwer_experiment,
    run_power_study,
    run_qualint_power_study,
    run_rejection_count_study,
)

CSV_HEADER = ["id", "group", "estimate", "std_err"]


class DataError(Exception):
    """Raised for malformed input files or values; maps to exit code 1."""


@dataclass(frozen=True)
class Dataset:
    records: tuple
    source: str = ""


def parse_csv(path: str) -> Dataset:
    """Read a study CSV with header ``id,group,estimate,std_err`` (group
    may be empty).  Errors name the offending line."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise DataError(
                f"{path}: header must be {','.join(CSV_HEADER)}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataError(f"{path}: line {lineno}: expected 4 fields")
            rid, group, est_s, se_s = (c.strip() for c in row)
            try:
                est = float(est_s)
                se = float(se_s)
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: estimate and std_err must be "
                    "numeric") from None
            if not np.isfinite(est):
                raise DataError(f"{path}: line {lineno}: estimate must be "
                                "finite")
            if not (np.isfinite(se) and se > 0):
                raise DataError(f"{path}: line {lineno}: std_err must be "
                                "positive")
            records.append(StudyRecord(id=rid, estimate=est, std_err=se,
                                       group=group or None))
    if not records:
        raise DataError(f"{path}: no data rows")
    return Dataset(tuple(records), source=path)


def write_csv(path: str, records: Sequence[StudyRecord]) -> None:
    """Emit records in the same format ``parse_csv`` accepts."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.id, r.group or "", repr(r.estimate),
                             repr(r.std_err)])


def _default_seed() -> int:
    return int(os.environ.get("CONDMT_SEED", "0"))


def _read_pvalues(args) -> np.ndarray:
    if args.pvalues is not None:
        try:
            vals = [float(v) for v in args.pvalues.split(",") if v.strip()]
        except ValueError:
            raise DataError("p-values must be numeric") from None
    elif args.input is not None:
        try:
            with open(args.input, encoding="utf-8") as fh:
                vals = [float(line) for line in fh if line.strip()]
        except OSError as exc:
            raise DataError(f"cannot open {args.input}: {exc}") from exc
        except ValueError:
            raise DataError(f"{args.input}: p-values must be numeric") \
                from None
    else:
        raise DataError("provide --pvalues or --input")
    if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
        raise DataError("p-values must be in [0, 1] and nonempty")
    return np.array(vals)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_global(args) -> int:
    p = _read_pvalues(args)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.tau == "adaptive":
        tau = auto_select_tau(p)
    else:
        try:
            tau = float(args.tau)
        except ValueError:
            raise DataError("--tau must be a number in (0,1] or 'adaptive'") \
                from None
        if not 0.0 < tau <= 1.0:
            raise DataError("--tau must be in (0, 1]")
    res = conditional_test(p, tau, args.method, trunc=args.trunc,
                           q_max=args.qmax, mc_draws=args.mc, seed=seed)
    out = res.as_dict()
    out["seed"] = seed
    del out["mc_draws"]
    _emit(out)
    return 0


def _cmd_qualint(args) -> int:
    ds = parse_csv(args.input)
    records = list(ds.records)
    if args.group_level:
        records = pool_by_group(records)
    seed = args.seed if args.seed is not None else _default_seed()
    tau = args.tau if args.tau == "adaptive" else float(args.tau)
    if args.method == "ibga":
        res = ibga(records)
    elif args.method == "gail_simon":
        _emit({"method": "gail_simon", "p_final": gail_simon_lrt(records),
               "n_used": len(records), "seed": seed})
        return 0
    else:
        res = qualitative_interaction_test(records, args.method, tau=tau,
                                           seed=seed)
    out = res.as_dict()
    out["seed"] = seed
    _emit(out)
    return 0


_TABLE2_SETTINGS = (
    ("all_null", "all_null"),
    ("1_strong_99_null", "1_strong_99_null"),
    ("1_strong_99_conservative", "1_strong_99_conservative"),
    ("20_weak_80_null", "20_weak_80_null"),
    ("20_weak_80_conservative", "20_weak_80_conservative"),
)
_TESTS = ("bonferroni", "fisher", "hc_plus", "truncated_product")


def power_method_grid() -> tuple:
    specs = []
    for t in _TESTS:
        specs.append(MethodSpec(t, "unconditional"))
        specs.append(MethodSpec(t, "conditional", 0.5))
        specs.append(MethodSpec(t, "adaptive"))
    return tuple(specs)


def _cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    out = {}
    if args.table == "2":
        rows = []
        for name, preset in _TABLE2_SETTINGS:
            cfg = ScenarioConfig(mu=preset, reps=args.reps, seed=seed,
                                 name=name, methods=power_method_grid())
            rows.extend(r.__dict__ for r in
                        run_power_study(cfg, workers=args.workers).rows)
        out = {"table": 2, "seed": seed, "rows": rows}
    elif args.table == "3":
        for name in ("no_conservative", "conservative"):
            cfg = ScenarioConfig(mu=name, reps=args.reps, seed=seed, name=name)
            out[name] = run_rejection_count_study(cfg, n_signals=20)
        out = {"table": 3, "seed": seed, "summaries": out}
    elif args.table == "4":
        rows = []
        settings = ("1_positive_99_null", "1_positive_1_negative",
                    "1_positive_99_negative", "20_positive_80_negative",
                    "50_positive_50_negative", "gradual_low", "gradual_high")
        methods = power_method_grid() + (MethodSpec("ibga"),
                                         MethodSpec("gail_simon"))
        for name in settings:
            cfg = ScenarioConfig(mu=name, reps=args.reps, seed=seed,
                                 name=name, methods=methods)
            rows.extend(r.__dict__ for r in
                        run_qualint_power_study(cfg, workers=args.workers).rows)
        out = {"table": 4, "seed": seed, "rows": rows}
    elif args.table == "equicorr":
        n = 1000
        rates = equicorr_fwer_experiment(
            [-1.0 / (n - 1), 0.0, 0.1, 0.5, 0.9], n=n, reps=args.reps,
            seed=seed)
        out = {"table": "equicorr", "seed": seed,
               "rates": {str(k): v for k, v in rates.items()}}
    elif args.table == "scan-calib":
        from .scan_test import calibrate_alpha_scan
        cfg = ScanConfig(seed=seed, calib_reps=max(args.reps, 1000))
        out = {"table": "scan-calib", "seed": seed, "n": args.n,
               "alpha_scan": calibrate_alpha_scan(args.n, cfg)}
    text = json.dumps(out, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_scan(args) -> int:
    p = _read_pvalues(args)
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = ScanConfig(tau0=args.tau0, alpha=args.alpha,
                     calib_reps=args.calib_reps, seed=seed)
    p_scan, alpha_scan, reject = scan_test(p, cfg)
    _emit({"method": "scan_bonferroni", "tau0": cfg.tau0, "n_used": p.size,
           "p_scan": p_scan, "n_p_scan": p.size * p_scan,
           "alpha_scan": alpha_scan, "reject": reject, "seed": seed})
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="condmt",
        description="Conditional global tests on (possibly conservative) "
                    "p-values")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("global", help="run a global test on p-values")
    g.add_argument("--pvalues", help="comma-separated p-values")
    g.add_argument("--input", help="file with one p-value per line")
    g.add_argument("--method", required=True, choices=METHODS)
    g.add_argument("--tau", default="1",
                   help="threshold in (0,1], or 'adaptive' (default 1)")
    g.add_argument("--trunc", type=float, default=0.5)
    g.add_argument("--qmax", type=float, default=0.5)
    g.add_argument("--mc", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=None)
    g.set_defaults(func=_cmd_global)

    q = sub.add_parser("qualint", help="test for qualitative interaction")
    q.add_argument("--input", required=True, help="study CSV file")
    q.add_argument("--method", required=True,
                   choices=METHODS + ("ibga", "gail_simon"))
    q.add_argument("--tau", default="1",
                   help="threshold in (0,1], or 'adaptive' (default 1)")
    q.add_argument("--group-level", action="store_true",
                   help="pool records sharing a group label first")
    q.add_argument("--seed", type=int, default=None)
    q.set_defaults(func=_cmd_qualint)

    s = sub.add_parser("simulate", help="run a Monte Carlo study")
    s.add_argument("--table", required=True,
                   choices=("2", "3", "4", "equicorr", "scan-calib"))
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--n", type=int, default=100,
                   help="sample size for scan-calib")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(func=_cmd_simulate)

    c = sub.add_parser("scan", help="calibrated scan conditional Bonferroni")
    c.add_argument("--pvalues", help="comma-separated p-values")
    c.add_argument("--input", help="file with one p-value per line")
    c.add_argument("--tau0", type=float, default=0.05)
    c.add_argument("--alpha", type=float, default=0.05)
    c.add_argument("--calib-reps", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=None)
    c.set_defaults(func=_cmd_scan)

    v = sub.add_parser("serve", help="start the HTTP session service")
    v.add_argument("--port", type=int, default=8008)
    v.add_argument("--bind", default="127.0.0.1")
    v.set_defaults(func=_cmd_serve)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
