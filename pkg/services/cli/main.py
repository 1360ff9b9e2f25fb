"""
PixInfo command-line entrypoint.

    python services/cli/main.py info   --synth histogram_exact:0=2,1=1,3=1 --splitter all
    python services/cli/main.py curves --input lena.pgm --kmax 64 --out out/
    python services/cli/main.py hu     --input lena.pgm --k 2 --k 8 --dump
    python services/cli/main.py check
    python services/cli/main.py check  --input "scans/*.pgm"

Flags override environment variables (``PIXINFO_*``, loaded from ``.env``),
which override built-in defaults.

Exit codes: 0 ok, 1 usage / configuration, 2 input I/O, 3 invariant breach.
"""
import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

_SERVICES = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
for _path in (_SERVICES, os.path.join(os.path.dirname(_SERVICES), "shared")):
    if _path not in sys.path:
        sys.path.insert(0, _path)

from dotenv import load_dotenv  # noqa: E402

from cli.checks import InvariantBreach, run_checks  # noqa: E402
from cli.commands import cmd_curves, cmd_hu, cmd_info  # noqa: E402
from image_io import PGMFormatError  # noqa: E402
from schemas import SPLITTER_CHOICES, RunConfig, SchemaValidationError  # noqa: E402

logger = logging.getLogger("PixInfoCLI")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BREACH = 0, 1, 2, 3

COMMANDS = {
    "info": cmd_info,
    "curves": cmd_curves,
    "hu": cmd_hu,
    "check": run_checks,
}


class UsageError(Exception):
    """Bad command-line flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_and_validate_config() -> Dict:
    """Load defaults from environment variables and validate ranges."""
    try:
        k_max = os.getenv("PIXINFO_KMAX")
        config = {
            "splitter": os.getenv("PIXINFO_SPLITTER"),
            "k_max": int(k_max) if k_max else None,
            "seed": int(os.getenv("PIXINFO_SEED", "0")),
            "volume_bits": os.getenv("PIXINFO_VOLUME_BITS", "auto").lower(),
            "out_dir": os.getenv("PIXINFO_OUT_DIR") or None,
            "size": os.getenv("PIXINFO_SYNTH_SIZE") or None,
            "log_level": os.getenv("LOG_LEVEL", "INFO").upper(),
        }
    except ValueError as exc:
        logger.critical("Invalid PixInfo configuration value: %s", exc)
        sys.exit(EXIT_USAGE)

    errors = []
    if config["splitter"] is not None and config["splitter"].lower() not in SPLITTER_CHOICES:
        errors.append(f"PIXINFO_SPLITTER={config['splitter']} must be one of {', '.join(SPLITTER_CHOICES)}")
    if config["k_max"] is not None and config["k_max"] < 1:
        errors.append(f"PIXINFO_KMAX={config['k_max']} must be >= 1")
    if config["seed"] < 0:
        errors.append(f"PIXINFO_SEED={config['seed']} must be >= 0")
    if config["volume_bits"] not in ("auto", "8", "16"):
        errors.append(f"PIXINFO_VOLUME_BITS={config['volume_bits']} must be one of auto, 8, 16")
    if config["log_level"] not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"LOG_LEVEL={config['log_level']} is not a logging level")

    if errors:
        for err in errors:
            logger.critical("Config validation error: %s", err)
        sys.exit(EXIT_USAGE)

    return config


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--input", dest="input_path", help="PGM file (P2 or P5)")
    source.add_argument("--synth", help="generator descriptor, e.g. two_gaussians:80,170,20,0.5")
    common.add_argument("--size", help="synthetic image size WxH")
    common.add_argument("--splitter", choices=SPLITTER_CHOICES, help="hierarchy splitting rule")
    common.add_argument("--kmax", dest="k_max", type=int, help="largest cluster count (default: g)")
    common.add_argument("--seed", type=int, help="generator seed")
    common.add_argument("--volume-bits", dest="volume_bits", choices=("auto", "8", "16"),
                        help="bits per pixel of the storage volume behind the percentages")
    common.add_argument("--out", dest="out_dir", help="output directory")

    parser = _Parser(prog="pixinfo", description="Integer information quantity of grayscale images.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    info = sub.add_parser("info", parents=[common], help="Hartley / Shannon / integer totals per k")
    info.add_argument("--recompute", action="store_true",
                      help="also report Q_integer of each rendered approximation, rebuilt from scratch")

    curves = sub.add_parser("curves", parents=[common], help="E and sigma against k, optimal vs hierarchical")
    curves.add_argument("--compact", action="store_true", help="per-depth 1, 2, 4, 8 ... partitions instead")

    hu = sub.add_parser("hu", parents=[common], help="invariant representation dump and images")
    hu.add_argument("--dump", action="store_true", help="also print the Hu table to stdout")
    hu.add_argument("--k", dest="ks", type=int, action="append", default=[],
                    help="render the k-cluster approximations (repeatable)")

    check = sub.add_parser("check", parents=[common], help="run the invariant battery")
    check.add_argument("--battery", dest="battery_path",
                       help="JSONL file of generator descriptors to check instead of the built-in battery")
    return parser


def resolve_config(args: argparse.Namespace, env: Dict) -> RunConfig:
    """Flags over environment over defaults; ``check`` covers every splitter unless told otherwise."""
    def pick(name: str):
        flag = getattr(args, name, None)
        return flag if flag is not None else env.get(name)

    splitter = pick("splitter") or ("all" if args.command == "check" else "otsu")
    return RunConfig.from_dict({
        "command": args.command,
        "input_path": args.input_path,
        "synth": args.synth,
        "size": pick("size"),
        "splitter": splitter,
        "k_max": pick("k_max"),
        "seed": pick("seed") or 0,
        "volume_bits": pick("volume_bits"),
        "out_dir": pick("out_dir"),
        "dump": getattr(args, "dump", False),
        "ks": getattr(args, "ks", []),
        "recompute": getattr(args, "recompute", False),
        "compact": getattr(args, "compact", False),
        "battery_path": getattr(args, "battery_path", None),
    })


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    env = _load_and_validate_config()
    logging.basicConfig(
        level=env["log_level"],
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )

    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args, env)
    except (UsageError, SchemaValidationError) as exc:
        logger.error("Usage error: %s", exc)
        return EXIT_USAGE

    try:
        COMMANDS[cfg.command](cfg, sys.stdout)
    except (OSError, PGMFormatError) as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except InvariantBreach as exc:
        logger.critical("%s", exc)
        return EXIT_BREACH
    except ValueError as exc:
        logger.error("Invalid request: %s", exc)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
