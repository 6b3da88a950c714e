"""``chronon <experiment> [--config FILE] [--out DIR] [--seed N]``.

Exit codes: 0 success, 1 a tolerance check failed, 2 bad configuration,
3 output could not be written.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import EXPERIMENTS, load, resolve
from .errors import ChrononError, ConfigError
from .experiments import RUNNERS
from .output import atomic_write_text, write_manifest, write_results

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chronon", description="Relational clock experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="JSON config, or a manifest.json from an earlier run")
    p.add_argument("--out", type=Path, help="output directory (overrides $CHRONON_OUT and the config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                   help="override one top-level config key, e.g. --set d=12")
    p.add_argument("--corrupt-generator", action="store_true",
                   help="use a mis-scaled clock generator (validate only); checks are expected to fail")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _overrides(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects KEY=JSON, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value  # bare strings need no quoting
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load(args.config) if args.config else {}
        if "config" in raw and isinstance(raw["config"], dict):
            raw = dict(raw["config"])
        raw.update(_overrides(args.set))
        if args.corrupt_generator:
            raw["debug"] = {**raw.get("debug", {}), "corrupt_generator": True}
        if args.no_plot:
            raw["plot"] = False
        out_dir = args.out or os.environ.get("CHRONON_OUT") or None
        cfg = resolve(raw, experiment=args.experiment, seed=args.seed,
                      output_dir=str(out_dir) if out_dir else None)
    except ConfigError as exc:
        print(f"chronon: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outcome = RUNNERS[cfg.experiment](cfg)
    except ChrononError as exc:
        print(f"chronon: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE

    for check in outcome.checks:
        print(check.line())

    manifest = {
        "version": __version__,
        "experiment": cfg.experiment,
        "config": cfg.to_dict(),
        "checks": [c.as_dict() for c in outcome.checks],
        "passed": outcome.passed,
        "notes": outcome.notes,
        "rows": len(outcome.rows),
    }
    try:
        target = Path(cfg.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        write_results(target / "results.csv", outcome.rows)
        if outcome.plot is not None:
            atomic_write_text(target / "plot.svg", outcome.plot)
        write_manifest(target / "manifest.json", manifest)
    except OSError as exc:
        print(f"chronon: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"{'PASS' if outcome.passed else 'FAIL'}  {cfg.experiment}: {len(outcome.rows)} rows -> {cfg.output_dir}")
    return EXIT_OK if outcome.passed else EXIT_TOLERANCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
