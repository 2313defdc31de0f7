"""Command line entry points: sweep, weight-table, validate.

Exit codes: 0 success, 1 configuration/validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, SystemConfig, config_from_file
from .fusion import EstimationMethod
from .harness import regenerate_weight_table, run_sweep, run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def _load_config(args) -> SystemConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        overrides["realizations"] = args.realizations
    if args.config is not None:
        return config_from_file(args.config, overrides)
    cfg = SystemConfig()
    if overrides:
        from .config import config_from_mapping
        cfg = config_from_mapping({k: str(v) for k, v in overrides.items()}, base=cfg)
    return cfg


def _parse_methods(raw: str) -> list:
    names = [item.strip() for item in raw.split(",") if item.strip()]
    try:
        return [EstimationMethod(name) for name in names]
    except ValueError as exc:
        valid = ", ".join(m.value for m in EstimationMethod)
        raise ConfigError(f"{exc}; valid methods: {valid}") from None


class _Parser(argparse.ArgumentParser):
    """Maps usage errors onto the config-error exit code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dualbandsim",
        description="Dual-band MIMO-OFDM link simulator: spectral-efficiency "
                    "sweeps over mmWave channel-estimation methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser(
        "sweep", help="Monte Carlo spectral-efficiency sweep over the config grids")
    sweep.add_argument("--config", help="flat key=value config file")
    sweep.add_argument("--methods",
                       default="conventional,perfect_csi,translating,averaging,weighting",
                       help="comma-separated method list")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--seed", type=int, help="override the config seed")
    sweep.add_argument("--realizations", type=int,
                       help="override the per-point realization count")
    sweep.add_argument("--parallelism", type=int, default=1,
                       help="worker processes (results are identical for any value)")

    table = sub.add_parser(
        "weight-table", help="regenerate the fusion weight lookup table")
    table.add_argument("--config", help="flat key=value config file")
    table.add_argument("--out", required=True, help="output CSV path")
    table.add_argument("--w-step", type=float, default=0.01,
                       help="weight grid step (must divide 1 evenly)")
    table.add_argument("--parallelism", type=int, default=1)

    sub.add_parser("validate", help="run the fast invariant suite on a small config")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep":
            cfg = _load_config(args)
            methods = _parse_methods(args.methods)
            if EstimationMethod.WEIGHTING in methods:
                print("note: building weight-table cells for the sweep grids first",
                      file=sys.stderr)
            run_sweep(cfg, methods, args.out, parallelism=args.parallelism)
        elif args.command == "weight-table":
            cfg = _load_config(args)
            regenerate_weight_table(cfg, args.out, w_step=args.w_step,
                                    parallelism=args.parallelism)
        elif args.command == "validate":
            return EXIT_OK if run_validation() else EXIT_CONFIG
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
