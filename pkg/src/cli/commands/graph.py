"""`graph` subcommand: DOT export of the laser couplings."""
import argparse

from src.cli.commands import add_common_arguments, add_sector_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("graph", help="Write the coupling graph in DOT format")
    add_common_arguments(parser)
    add_sector_arguments(parser)
    parser.set_defaults(mode=RunMode.GRAPH)
    return parser
