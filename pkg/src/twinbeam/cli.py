"""Command-line entry point: ``twinbeam <subcommand> [options]``."""

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .nopo import squeezed_variances
from .oracle import OracleError, oracle_run, qnl_calibration
from .pipeline import (ConfigError, emit_outputs, load_config, run_coexistence_report,
                       run_correlation_sweep, run_visibility_sweep)
from .quadrature import variance_to_db

ORACLE_TOLERANCE_DB = 0.1
QNL_TOLERANCE_DB = 0.05


class CheckFailed(RuntimeError):
    pass


def _settings(cfg, args):
    oracle = cfg.oracle
    if args.seed is not None:
        oracle = replace(oracle, seed=args.seed)
    if args.oracle:
        oracle = replace(oracle, enabled=True)
    cfg = replace(cfg, oracle=oracle)
    if args.out is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    return cfg


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                        for x in row])


def _write_manifest(cfg, name, seed, outputs):
    from . import __version__
    path = os.path.join(cfg.output.directory, f"{name}.manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"command": name, "config": cfg.to_dict(), "seed": seed,
                   "version": __version__,
                   "outputs": [os.path.basename(p) for p in outputs]},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_visibility_sweep(cfg, args):
    return emit_outputs(run_visibility_sweep(cfg, points=args.points), cfg)


def cmd_correlation_sweep(cfg, args):
    res = run_correlation_sweep(cfg, points=args.points, workers=args.workers)
    return emit_outputs(res, cfg)


def cmd_coexistence_report(cfg, args):
    return emit_outputs(run_coexistence_report(cfg), cfg)


def cmd_oracle_check(cfg, args):
    o = cfg.oracle
    f = cfg.analysis_frequency
    res = oracle_run(cfg.nopo, cfg.mz1, cfg.mz2, 0.0, o.seed, f=f,
                     n_samples=o.n_samples, sample_rate=o.sample_rate, rbw=o.rbw,
                     n_records=o.n_records, readout_span=o.readout_span)
    vx, vy = squeezed_variances(cfg.nopo, f)
    vx_db, vy_db = (float(variance_to_db(v, cfg.nopo.qnl)) for v in (vx, vy))
    rows = []
    for name, analytic, est, tol in (("vx_minus", vx_db, res.vx_minus_db, ORACLE_TOLERANCE_DB),
                                     ("vy_plus", vy_db, res.vy_plus_db, ORACLE_TOLERANCE_DB),
                                     ("qnl", 0.0, res.qnl_db, QNL_TOLERANCE_DB)):
        diff = est - analytic
        rows.append((name, analytic, est, diff, tol, "true" if abs(diff) <= tol else "false"))
    os.makedirs(cfg.output.directory, exist_ok=True)
    path = os.path.join(cfg.output.directory, "oracle_check.csv")
    _write_rows(path, ["quantity", "analytic_db", "oracle_db", "difference_db",
                       "tolerance_db", "pass"], rows)
    written = [path, _write_manifest(cfg, "oracle_check", o.seed, [path])]
    failed = [r[0] for r in rows if r[-1] == "false"]
    if failed:
        raise CheckFailed(f"oracle disagrees with the analytic model on {', '.join(failed)}")
    return written


def cmd_qnl_calibrate(cfg, args):
    o = cfg.oracle
    readings, spectra = qnl_calibration(
        cfg.nopo, cfg.mz1, cfg.mz2, o.seed, f=cfg.analysis_frequency,
        n_samples=o.n_samples, sample_rate=o.sample_rate, rbw=o.rbw,
        n_records=o.n_records, readout_span=o.readout_span)
    os.makedirs(cfg.output.directory, exist_ok=True)
    path = os.path.join(cfg.output.directory, "qnl_calibration.csv")
    _write_rows(path, ["interferometer", "mode", "channel", "expected", "measured", "error_db"],
                [(r.interferometer, r.mode, r.channel, float(r.expected), r.measured, r.error_db)
                 for r in readings])
    written = [path]
    for (i, mode), est in sorted(spectra.items()):
        p = os.path.join(cfg.output.directory, f"qnl_spectrum_mz{i}_{mode}.csv")
        est.write_csv(p)
        written.append(p)
    written.append(_write_manifest(cfg, "qnl_calibrate", o.seed, written))
    return written


COMMANDS = {
    "visibility-sweep": (cmd_visibility_sweep, "fringe visibility against detuning"),
    "correlation-sweep": (cmd_correlation_sweep, "correlation variances against detuning"),
    "coexistence-report": (cmd_coexistence_report, "regions of coherence and entanglement"),
    "oracle-check": (cmd_oracle_check, "Monte Carlo check of the analytic levels"),
    "qnl-calibrate": (cmd_qnl_calibrate, "shot-noise calibration of both interferometers"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="twinbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="JSON configuration file (defaults if omitted)")
        sp.add_argument("--out", help="output directory (overrides output.directory)")
        sp.add_argument("--seed", type=int, help="random seed (overrides oracle.seed)")
        sp.add_argument("--oracle", action="store_true", help="add Monte Carlo columns")
        sp.add_argument("--points", type=int, help="number of sweep points")
        sp.add_argument("--workers", type=int, default=1,
                        help="processes for oracle sweep points")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        if args.points is not None and args.points < 2:
            raise ConfigError(f"--points must be >= 2, got {args.points}")
        cfg = _settings(load_config(args.config), args)
        written = func(cfg, args)
    except (ConfigError, OracleError, CheckFailed, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 3 if isinstance(exc, CheckFailed) else 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
