"""Command-line entry point: ``cdsc <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from ..code import FamilyParams
from ..noise import parse_eta
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import hashing_rows, run_experiment
from .io import format_rows, write_csv
from .plot import PLOT_KINDS, emit_plot
from .rates import CodeSpec, DecoderSpec, TrialError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

SUBCOMMANDS = {
    "sweep3x3": "small_code_sweep",
    "rate": "logical_rate",
    "subthreshold": "subthreshold",
    "threshold": "threshold",
    "dprime": "dprime_sweep",
    "phase-scan": "phase_scan",
    "percolation": "percolation",
    "cluster-threshold": "cluster_threshold",
}

HELP = {
    "sweep3x3": "exact rates of every 3x3 deformation pattern",
    "rate": "Monte Carlo logical error rate per (code, L, p, eta)",
    "subthreshold": "rates versus L below threshold",
    "threshold": "rates over a p grid plus a finite-size-scaling fit",
    "dprime": "effective-distance increment over family points",
    "phase-scan": "infinite-bias rates across family points",
    "percolation": "constraint-cluster statistics at infinite bias",
    "cluster-threshold": "self-dual cluster estimates of the XY-code threshold",
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _etas(text: str) -> tuple[float, ...]:
    return tuple(parse_eta(v) for v in text.split(",") if v.strip())


def _points(text: str) -> tuple[FamilyParams, ...]:
    return tuple(FamilyParams(*_floats(chunk)) for chunk in text.split(";") if chunk.strip())


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="experiment config file")
    sp.add_argument("--seed", type=int, help="master seed")
    sp.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    sp.add_argument("--out", help="output CSV (default: stdout)")
    sp.add_argument("--decoder", choices=("exact", "tn", "transfer", "enumerate"))
    sp.add_argument("--chi", type=int, help="bond dimension of the TN decoder")
    sp.add_argument("--jobs", type=int, help="worker processes")
    sp.add_argument("--code", action="append", help="preset, family:a,b, cell:ROWS, pattern:LETTERS or ti (repeatable)")
    sp.add_argument("--L", type=_ints, help="comma-separated lattice sizes")
    sp.add_argument("--p", type=_floats, help="comma-separated error rates")
    sp.add_argument("--eta", type=_etas, help="comma-separated biases (inf allowed)")
    sp.add_argument("--points", type=_points, help="family points 'a,b;a,b'")
    sp.add_argument("--samples", type=int, help="realisations per point (dprime)")
    sp.add_argument("--realizations", type=int, help="realisations per size (percolation)")
    sp.add_argument("--levels", type=_ints, help="cluster levels, e.g. 0,1,2")
    sp.add_argument("--mc-samples", type=int, help="disorder samples for large clusters")
    sp.add_argument("--no-convergence-check", action="store_true", help="skip the chi-8 rerun of the TN decoder")
    sp.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cdsc", description="Clifford-deformed surface code experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        _add_common(sub.add_parser(name, help=HELP[name]))
    hb = sub.add_parser("hashing-bound", help="hashing bound of the biased channel")
    hb.add_argument("--eta", type=_etas, required=True)
    hb.add_argument("--out")
    pl = sub.add_parser("plot", help="render a CSV as SVG")
    pl.add_argument("csv")
    pl.add_argument("--kind", choices=PLOT_KINDS, required=True)
    pl.add_argument("--out", required=True, help="output SVG path")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kind = SUBCOMMANDS[args.command]
    if args.config:
        cfg = load_config(args.config)
        if cfg.kind != kind:
            raise ConfigError(f"config kind {cfg.kind!r} does not match subcommand {args.command!r}")
    else:
        cfg = ExperimentConfig(kind)
    try:
        dec = cfg.decoder
        if args.decoder or args.chi or args.no_convergence_check:
            dec = DecoderSpec(
                args.decoder or dec.name,
                args.chi or dec.chi,
                dec.check_convergence and not args.no_convergence_check,
            )
        codes = tuple(CodeSpec.parse(c) for c in args.code) if args.code else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.with_overrides(
        master_seed=args.seed,
        trials=args.trials,
        out=args.out,
        jobs=args.jobs,
        decoder=dec,
        codes=codes,
        Ls=args.L,
        ps=args.p,
        etas=args.eta,
        points=args.points,
        samples=args.samples,
        realizations=args.realizations,
        levels=args.levels,
        mc_samples=args.mc_samples,
    )


def _emit(results: dict[str, list[dict]], out: str | None) -> None:
    names = list(results)
    for k, schema in enumerate(names):
        if out is None:
            sys.stdout.write(format_rows(schema, results[schema]))
            continue
        path = Path(out)
        if k > 0:
            path = path.with_name(f"{path.stem}_{schema}{path.suffix or '.csv'}")
        write_csv(path, schema, results[schema])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "plot":
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                emit_plot(args.csv, args.kind, args.out)
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
            return EXIT_OK
        if args.command == "hashing-bound":
            _emit({"hashing": hashing_rows(args.eta)}, args.out)
            return EXIT_OK
        cfg = config_from_args(args)
        results = run_experiment(cfg)
        _emit(results, cfg.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrialError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
