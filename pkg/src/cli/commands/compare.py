"""`compare` subcommand: effective Hamiltonian against perfect blockade."""
import argparse

from src.cli.commands import add_common_arguments, add_grid_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("compare", help="Compare finite-Δ effective and ideal dynamics")
    add_common_arguments(parser)
    add_grid_arguments(parser)
    parser.add_argument("--observables", nargs="+", help="Columns to compare, e.g. beta g2_2")
    parser.set_defaults(mode=RunMode.COMPARE)
    return parser
