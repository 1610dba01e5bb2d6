"""`spectrum` subcommand: density of states of the full Hamiltonian."""
import argparse

from src.cli.commands import add_common_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("spectrum", help="Histogram the full many-body spectrum")
    add_common_arguments(parser)
    parser.add_argument("--bin-width", type=float, help="Energy bin width (ε)")
    parser.set_defaults(mode=RunMode.SPECTRUM)
    return parser
