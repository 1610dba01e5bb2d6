"""Pytest configuration and fixtures."""
from typing import Callable, List

import numpy as np
import pytest

from src.core.config import settings
from src.main import main
from src.models.params import ModelParams, TimeGrid
from src.services.hamiltonian import perfect_blockade_hamiltonian
from src.services.propagator import Propagator, Wavefunction, vacuum
from src.services.symmetric_basis import SymmetricBasis, build_basis


@pytest.fixture
def params_n4() -> ModelParams:
    """Perfect-blockade ring of four sites."""
    return ModelParams(n_sites=4)


@pytest.fixture
def params_n10() -> ModelParams:
    """Perfect-blockade ring of ten sites."""
    return ModelParams(n_sites=10)


@pytest.fixture
def basis_n4(params_n4: ModelParams) -> SymmetricBasis:
    """Blockaded symmetric basis {0000, 0001, 0101}."""
    return build_basis(params_n4)


@pytest.fixture
def basis_n10(params_n10: ModelParams) -> SymmetricBasis:
    """Blockaded symmetric basis of the ten-site ring."""
    return build_basis(params_n10)


@pytest.fixture
def short_grid() -> TimeGrid:
    """Grid covering the short-time peaks."""
    return TimeGrid(t_end=3.0, dt=0.02)


@pytest.fixture
def single_excitation_n4(basis_n4: SymmetricBasis) -> Wavefunction:
    """Uniform superposition of the four single-excitation configurations."""
    amps = np.zeros(len(basis_n4), dtype=complex)
    amps[basis_n4.index[0b0001]] = 1.0
    return Wavefunction(amps, 4, basis_n4)


@pytest.fixture
def evolved_n10(params_n10: ModelParams) -> Callable[[float], Wavefunction]:
    """Perfect-blockade state of the ten-site ring at time t."""
    hamiltonian = perfect_blockade_hamiltonian(params_n10)
    propagator = Propagator(hamiltonian)
    start = vacuum(hamiltonian.basis)
    return lambda t: propagator.state_at(start, t)


@pytest.fixture
def run_cli(tmp_path) -> Callable[..., int]:
    """Run the command-line entry point with a fresh output directory."""

    def run(*argv: str) -> int:
        args: List[str] = list(argv)
        if "--output-dir" not in args:
            args += ["--output-dir", str(tmp_path / "run")]
        return main(args)

    return run


@pytest.fixture
def isolated_output(tmp_path, monkeypatch):
    """Point the default output directory at a temporary path."""
    monkeypatch.setattr(settings, "output_dir", str(tmp_path / "runs"))
    return tmp_path / "runs"
