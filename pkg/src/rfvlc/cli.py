"""Command-line entry point: ``rfvlc <verb> [options]``.

Exit codes: 0 on success, 2 for a bad configuration or arguments,
3 when a numerical step fails.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from collections import Counter

from . import config as _config
from .experiments import NumericalFailure, run_sweep, write_csv

VERBS = {
    "ec-sweep": "fig3-ec-vs-theta",
    "blockage-sweep": "fig4-ec-vs-mu",
    "users-sweep": "fig5-ec-vs-users",
    "delay-sweep": "fig6-delay-vs-arrival",
    "queue-validate": "queue-validate",
}

HELP = {
    "ec-sweep": "effective capacity of both links against theta",
    "blockage-sweep": "VLC effective capacity against LoS availability",
    "users-sweep": "per-user effective capacity under TDMA and FDMA",
    "delay-sweep": "delay bound against arrival rate",
    "queue-validate": "simulate the buffer and check tail exponent and delay bound",
}

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rfvlc", description="RF/VLC effective capacity experiments")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, text in HELP.items():
        sp = sub.add_parser(verb, help=text, description=text)
        sp.add_argument("--config", help="scenario YAML (defaults when omitted)")
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--samples", type=int, help="Monte Carlo draws per curve")
        sp.add_argument("--method", choices=("closed-form", "quadrature", "monte-carlo"),
                        help="VLC effective-capacity method")
        sp.add_argument("--frames", type=int, help="frames per queue simulation")
        sp.add_argument("--workers", type=int, help="parallel threads")
        sp.add_argument("--units", choices=("bps", "bpf"), default="bps",
                        help="bits/s (default) or bits per frame")
        sp.add_argument("--out", help="CSV path; a .meta.json sidecar is written next to it")
    sub.add_parser("show-defaults", help="print the default scenario as YAML")
    return p


def _diagnose(err: _config.ConfigError) -> None:
    print("configuration error:", file=sys.stderr)
    for d in err.diagnostics:
        print(f"  {d}", file=sys.stderr)


def _report(caught) -> None:
    """One line per warning category instead of one per sweep point."""
    counts = Counter(w.category.__name__ for w in caught)
    first = {}
    for w in caught:
        first.setdefault(w.category.__name__, str(w.message))
    for name, n in counts.items():
        extra = f" (and {n - 1} similar)" if n > 1 else ""
        print(f"warning: {name}: {first[name]}{extra}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "show-defaults":
        sys.stdout.write(_config.defaults_yaml())
        return 0
    try:
        scenario = (_config.load(args.config) if args.config
                    else _config.default_scenario())
        scenario = _config.with_run_overrides(
            scenario, seed=args.seed, samples=args.samples, method=args.method,
            frames=args.frames, workers=args.workers)
    except _config.ConfigError as err:
        _diagnose(err)
        return EXIT_CONFIG
    except OSError as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if scenario.workers < 1 or scenario.frames < 1:
        print("workers and frames must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = run_sweep(scenario, VERBS[args.verb], units=args.units)
        _report(caught)
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        meta = write_csv(result, args.out)
        print(f"wrote {args.out} ({len(result.rows)} rows) and {meta}", file=sys.stderr)
    else:
        sys.stdout.write(result.csv_body())
    return 0


if __name__ == "__main__":
    sys.exit(main())
