"""Command-line entry point: ``python -m src.main <subcommand> [flags]``."""
import argparse
import json
import sys
from typing import List, Optional

from pydantic import ValidationError

from src import __version__
from src.cli.commands import basis, collect_overrides, compare, evolve, graph, spectrum, verify
from src.cli.middleware.error_handler import (
    generic_exception_handler,
    simulation_exception_handler,
)
from src.cli.middleware.validation import validation_exception_handler
from src.cli.schemas.run_config import RunConfig
from src.core.config import settings
from src.core.errors import EXIT_OK, SimulationException
from src.core.logging import configure_logging
from src.services.run_service import RunService, to_jsonable


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydring",
        description="Excitation dynamics of Rydberg superatoms on a ring lattice",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (basis, evolve, compare, spectrum, graph, verify):
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, run the subcommand and return the process exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level)
    try:
        config = RunConfig.from_sources(args.config, collect_overrides(args))
        summary = RunService(config).execute()
    except ValidationError as exc:
        return validation_exception_handler(exc)
    except SimulationException as exc:
        return simulation_exception_handler(exc)
    except Exception as exc:
        return generic_exception_handler(exc)
    print(json.dumps(to_jsonable(summary), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
