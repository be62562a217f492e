"""Command-line entry point: ``spinsync <mode> [--config FILE] [--out PATH] ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import MODES, ConfigParseError, JobSpec, parse_config, validate
from .liouvillian import ConfigError
from .runner import render, run

log = logging.getLogger("spinsync")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="job description file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int)
    common.add_argument("--entropy-base", choices=("e", "2"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="spinsync", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "steady": "steady state moments and diagnostics",
        "dist": "phase distributions S_1, S_2 (and joint S_2/S_3 with joint = true)",
        "sweep2d": "moments over a two-parameter grid",
        "locus": "coupling-induced blockade ratio by bisection",
        "perturb": "polynomial coefficients of moments from the perturbation series",
        "entangle": "entropy, mutual information, negativity and correlations",
    }
    for mode in MODES:
        sub.add_parser(mode, parents=[common], help=helps[mode])
    return parser


def load_spec(args) -> JobSpec:
    if args.config is not None:
        spec = parse_config(args.config.read_text(encoding="utf-8"))
    else:
        spec = JobSpec()
    overrides = {"mode": args.mode}
    for key in ("out", "format", "workers", "entropy_base"):
        v = getattr(args, key)
        if v is not None:
            overrides[key] = v
    return validate(replace(spec, **overrides))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        spec = load_spec(args)
    except (ConfigParseError, ConfigError, OSError) as exc:
        print(f"spinsync: config error: {exc}", file=sys.stderr)
        return 2
    try:
        outputs = render(run(spec), spec)
    except Exception as exc:  # noqa: BLE001 - any fatal job error maps to exit 1
        print(f"spinsync: {spec.mode} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if spec.out is None:
        for _, text in outputs:
            sys.stdout.write(text)
        return 0
    out = Path(spec.out)
    for suffix, text in outputs:
        path = out if not suffix else out.with_name(out.stem + suffix + out.suffix)
        path.write_text(text, encoding="utf-8")
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
