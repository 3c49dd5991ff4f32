"""Command line: ``paretopolymer run`` and ``paretopolymer sweep``."""
from __future__ import annotations

import argparse
import sys

from .experiments import ConfigError, ExperimentConfig, load_config, parse_override, run, sweep


def _parse_values(text: str) -> list:
    return [parse_override(f"v={v}")[1] for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paretopolymer", description="Seeded experiments for the Pareto polymer model.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("--config", required=True, help="TOML file with experiment keys")
    r.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    r.add_argument("--out", required=True, help="output directory")
    s = sub.add_parser("sweep", help="run an experiment over several values of one key")
    s.add_argument("--config", required=True)
    s.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--axis", required=True, help="numeric config key to vary")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--out", required=True)
    return ap


def _report(record) -> None:
    cfg = record.config
    for name, ok in record.verdicts.items():
        print(f"{cfg['kind']} seed={cfg['seed']} {name}: {'PASS' if ok else 'FAIL'}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg: ExperimentConfig = load_config(args.config, args.overrides)
        if args.command == "run":
            records = [run(cfg, args.out)]
        else:
            records = sweep(cfg, args.axis, _parse_values(args.values), args.out)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for rec in records:
        _report(rec)
    return 0 if all(rec.passed for rec in records) else 1


if __name__ == "__main__":
    sys.exit(main())
