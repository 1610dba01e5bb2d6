"""`verify` subcommand: symmetric-basis run against the brute-force oracle."""
import argparse

from src.cli.commands import add_common_arguments, add_grid_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("verify", help="Check observables against full-space dynamics")
    add_common_arguments(parser)
    add_grid_arguments(parser)
    parser.set_defaults(mode=RunMode.VERIFY)
    return parser
