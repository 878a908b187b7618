"""Batch command line: ``irssec {fig1,fig2,run,validate} [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .config import ConfigError, load_config, to_jsonable
from .experiments import run_experiment, with_grid
from .results import emit_results, run_metadata
from .validation import run_validation_suite

log = logging.getLogger("irssec")

VERBS = {"fig1": "fig1_sweep", "fig2": "fig2_sweep", "run": "single_point", "validate": "validation_suite"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irssec", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, helptext in (
        ("fig1", "secrecy rate vs IRS size"),
        ("fig2", "secrecy rate vs eavesdropper position"),
        ("run", "single operating point"),
        ("validate", "cross-module self-checks"),
    ):
        p = sub.add_parser(verb, help=helptext)
        p.add_argument("--config", type=Path, help="YAML experiment config")
        p.add_argument("--seed", type=int, help="override experiment.master_seed")
        p.add_argument("--trials", type=int, help="override experiment.n_trials")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--scheme", choices=("proposed", "benchmark", "both"))
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")
    return parser


def _validate(spec, out: Path) -> int:
    results = run_validation_suite(spec.validation)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail} ({r.seconds:.1f}s)")
    report = {"passed": all(r.passed for r in results), "checks": [asdict(r) for r in results]}
    out.mkdir(parents=True, exist_ok=True)
    (out / "validation.json").write_text(json.dumps(to_jsonable(report), indent=2) + "\n")
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = load_config(args.config).with_overrides(seed=args.seed, trials=args.trials, scheme=args.scheme)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.trials is not None and args.trials < 1:
        print("config error: --trials must be >= 1", file=sys.stderr)
        return 2

    if args.verb == "validate":
        return _validate(spec, args.out)

    kind = VERBS[args.verb]
    spec = with_grid(spec, kind, spec.grid if spec.kind == kind else None)
    t0 = time.perf_counter()
    sweep = run_experiment(spec, jobs=max(1, args.jobs))
    log.info("%s finished in %.1fs", args.verb, time.perf_counter() - t0)
    meta = run_metadata(spec, sweep)
    try:
        csv_path, _ = emit_results(sweep.rows, args.out, meta)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {csv_path}")
    return 1 if meta["failed_points"] else 0


if __name__ == "__main__":
    sys.exit(main())
