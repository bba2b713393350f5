"""Command-line front end.

Subcommands: run, sweep, find-resonance, audit, freq.  Exit codes:
0 success, 2 configuration/validation error, 3 numerical divergence.
"""

import argparse
import os
import sys

from . import indexcomb, resonance
from .config import (ConfigError, load_config, parse_real, resolve_out_dir,
                     with_parameter)
from .experiments import run_experiment, sweep, sweep_to_csv
from .freqlat import FrequencyRangeError, ParameterError, frequency, truncate
from .integrators import MidpointDivergenceError
from .tableio import csv_line, format_float, write_atomic

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3


def parse_entries(text):
    """Multi-index from tokens like '2+,5+,-7-' (index then sign)."""
    entries = []
    for token in text.split(","):
        token = token.strip()
        if not token or token[-1] not in "+-":
            raise ConfigError(f"bad multi-index entry {token!r} "
                              "(expected e.g. 2+ or -7-)")
        entries.append((int(token[:-1]), 1 if token[-1] == "+" else -1))
    return tuple(entries)


def _cmd_run(args):
    cfg = load_config(args.config)
    series, report = run_experiment(cfg, out_dir=args.out_dir)
    print(f"ran {report.n_reached} steps of {cfg.scheme} (h={cfg.h!r}); "
          f"records={series.n_records}")
    print(f"epsilon={format_float(report.epsilon)} "
          f"max_sobolev={format_float(report.max_sobolev)} "
          f"max_action_drift={format_float(report.max_action_drift)}")
    return EXIT_OK


def _cmd_sweep(args):
    cfg = load_config(args.config)
    values = [parse_real(v, " in --values") for v in args.values.split(",")]
    rows = sweep(cfg, args.param, values, jobs=args.jobs)
    text = sweep_to_csv(args.param, rows)
    if args.out:
        write_atomic(os.path.join(resolve_out_dir(args.out_dir), args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_find_resonance(args):
    cfg = load_config(args.config)
    j = parse_entries(args.entries)
    query = resonance.ResonanceQuery(
        j=j, freq=cfg.freq, phase=args.phase,
        target=parse_real(args.target, " in --target"),
        bracket=(parse_real(args.bracket[0]), parse_real(args.bracket[1])),
        tol=args.tol)
    if args.scan:
        hits = resonance.scan_resonances(
            j, cfg.freq, args.phase,
            (query.bracket[0], query.bracket[1]), args.scan_grid,
            window=args.window)
        emit = resonance.scan_to_csv if args.format == "csv" else resonance.scan_to_text
        sys.stdout.write(emit(hits))
        return EXIT_OK
    root = resonance.find_resonant_step(query)
    psi = indexcomb.psi_sum(j, cfg.freq, root, args.phase)
    print(f"h = {format_float(root)}")
    print(f"Psi(h) = {format_float(psi)}  "
          f"|e^iPsi - 1| = {format_float(indexcomb.small_divisor(psi))}")
    return EXIT_OK


def _cmd_audit(args):
    cfg = load_config(args.config)
    audit = indexcomb.audit_truncated_divisors(
        cfg.freq, h=cfg.h, K=cfg.K, ell=args.ell, k_max=args.k_max,
        alpha=args.alpha, stress=args.stress)
    sys.stdout.write(audit.to_csv() if args.format == "csv" else audit.to_text())
    return EXIT_OK


def _cmd_freq(args):
    cfg = load_config(args.config)
    import math
    truncated = math.isfinite(cfg.K)
    if args.format == "csv":
        header = "k,omega" + (",omega_truncated" if truncated else "")
        print(header)
        for a in range(-cfg.freq.index_bound, cfg.freq.index_bound + 1):
            row = [a, frequency(cfg.freq, a)]
            if truncated:
                row.append(truncate(cfg.freq, cfg.h, cfg.K, a))
            print(csv_line(row))
    else:
        for a in range(-cfg.freq.index_bound, cfg.freq.index_bound + 1):
            line = f"{a:5d}  {frequency(cfg.freq, a):18.10f}"
            if truncated:
                line += f"  {truncate(cfg.freq, cfg.h, cfg.K, a):18.10f}"
            print(line)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="resonlab",
        description="spectral simulator and resonance toolkit for split-step "
                    "and midpoint discretizations of cubic NLS")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute one configured experiment")
    r.add_argument("config")
    r.add_argument("--out-dir", default=None)
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="run the experiment once per parameter value")
    s.add_argument("config")
    s.add_argument("--param", required=True, choices=("h", "K", "epsilon"))
    s.add_argument("--values", required=True,
                   help="comma-separated values (pi-forms accepted)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", default="", help="also write the table to this file")
    s.add_argument("--out-dir", default=None)
    s.set_defaults(func=_cmd_sweep)

    fr = sub.add_parser("find-resonance",
                        help="solve Psi(h, j) = target for the stepsize h")
    fr.add_argument("config", help="config file providing the frequency model")
    fr.add_argument("--entries", required=True,
                    help="multi-index, e.g. '2+,5+,-7-'")
    fr.add_argument("--phase", choices=("splitting", "midpoint"),
                    default="midpoint")
    fr.add_argument("--target", default="0")
    fr.add_argument("--bracket", nargs=2, default=("0.01", "1.0"))
    fr.add_argument("--tol", type=float, default=1e-10)
    fr.add_argument("--scan", action="store_true",
                    help="grid-scan for near-2*pi*Z phases instead of root-finding")
    fr.add_argument("--scan-grid", type=int, default=400)
    fr.add_argument("--window", type=float, default=0.05)
    fr.add_argument("--format", choices=("text", "csv"), default="text")
    fr.set_defaults(func=_cmd_find_resonance)

    a = sub.add_parser("audit", help="small-divisor audit of the truncated scheme")
    a.add_argument("config", help="config file providing freq model, h and K")
    a.add_argument("--ell", type=int, required=True)
    a.add_argument("--k-max", type=int, required=True)
    a.add_argument("--alpha", type=float, default=1.0)
    a.add_argument("--stress", action="store_true",
                   help="permit K > pi to demonstrate large-K resonances")
    a.add_argument("--format", choices=("text", "csv"), default="text")
    a.set_defaults(func=_cmd_audit)

    f = sub.add_parser("freq", help="print the frequency table of a config")
    f.add_argument("config")
    f.add_argument("--format", choices=("text", "csv"), default="text")
    f.set_defaults(func=_cmd_freq)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MidpointDivergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ConfigError, ParameterError, FrequencyRangeError, ValueError,
            OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
