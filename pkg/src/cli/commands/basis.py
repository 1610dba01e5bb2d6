"""`basis` subcommand: bracelet and blockaded-sector counts."""
import argparse

from src.cli.commands import add_common_arguments, add_sector_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("basis", help="Count bracelets and symmetric sector states")
    add_common_arguments(parser)
    add_sector_arguments(parser)
    parser.add_argument("--bracelet-method", choices=["enumerate", "necklace"])
    parser.set_defaults(mode=RunMode.BASIS)
    return parser
