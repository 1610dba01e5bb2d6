"""Subcommand parsers. Each module registers one subcommand on the shared parser."""
import argparse
from pathlib import Path
from typing import Any, Dict

OVERRIDE_FIELDS = (
    "mode",
    "n_sites",
    "m",
    "delta",
    "t_start",
    "t_end",
    "dt",
    "g2_distances",
    "window",
    "output_dir",
    "sector",
    "nu",
    "bin_width",
    "observables",
    "peak_criteria",
    "propagation",
    "bracelet_method",
)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand."""
    parser.add_argument("--config", type=Path, help="TOML file with run settings")
    parser.add_argument("--n", dest="n_sites", type=int, help="Ring size N")
    parser.add_argument("--m", type=int, help="Blockade range m")
    parser.add_argument("--delta", help="Interaction strength Δ or 'infinite'")
    parser.add_argument("--output-dir", type=Path, help="Run directory")
    parser.add_argument("--log-level", help="Logging level")


def add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags of the sampling grid."""
    parser.add_argument("--t-start", type=float, help="First sample time (τ₀)")
    parser.add_argument("--t-end", type=float, help="Last sample time (τ₀)")
    parser.add_argument("--dt", type=float, help="Sampling step (τ₀)")
    parser.add_argument(
        "--g2", dest="g2_distances", type=int, nargs="+", help="Distances k for g₂ columns"
    )


def add_sector_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sector", choices=["blockaded", "nu", "all"])
    parser.add_argument("--nu", type=int, help="ν for the 'nu' sector")


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags given on the command line, keyed by RunConfig field."""
    return {field: getattr(args, field, None) for field in OVERRIDE_FIELDS}
