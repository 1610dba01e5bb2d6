"""`evolve` subcommand: observables of the quench from the vacuum."""
import argparse

from src.cli.commands import add_common_arguments, add_grid_arguments
from src.cli.schemas.run_config import RunMode


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("evolve", help="Evolve from the vacuum and record observables")
    add_common_arguments(parser)
    add_grid_arguments(parser)
    parser.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"))
    parser.add_argument("--propagation", choices=["auto", "spectral", "krylov"])
    parser.add_argument(
        "--peak-criteria",
        action="store_const",
        const=True,
        help="Reject grids too coarse to locate peaks",
    )
    parser.set_defaults(mode=RunMode.EVOLVE)
    return parser
