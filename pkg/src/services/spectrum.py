"""Many-body spectrum of the full Hamiltonian: density of states and ν-manifolds."""
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.errors import (
    InvalidParameterException,
    NumericalException,
    ProblemTooLargeException,
)
from src.models.params import ModelParams
from src.models.ring_config import nu_array
from src.services.hamiltonian import HermitianMatrix, full_hamiltonian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityOfStates:
    """Eigenvalue counts per energy bin (units of ε)."""

    edges: np.ndarray
    counts: np.ndarray

    @property
    def centres(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class Manifold:
    """Eigenstates sharing one interaction label ν = round(⟨H_int⟩/Δ)."""

    nu: int
    count: int
    centre: float
    lower: float
    upper: float
    overlaps_next: bool = False

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_dict(self) -> Dict[str, float]:
        return {
            "nu": self.nu,
            "count": self.count,
            "centre": self.centre,
            "lower": self.lower,
            "upper": self.upper,
            "width": self.width,
            "overlaps_next": self.overlaps_next,
        }


def _eigh(matrix: np.ndarray, eigvals_only: bool = False):
    try:
        if eigvals_only:
            return scipy.linalg.eigvalsh(matrix)
        return scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalException(f"eigendecomposition failed: {exc}") from exc


def dos_histogram(hamiltonian: HermitianMatrix, bin_width: float) -> DensityOfStates:
    """Histogram of the eigenenergies.

    Args:
        hamiltonian: Hamiltonian to diagonalize (dense eigensolver)
        bin_width: Energy bin width in units of ε

    Returns:
        Counts per bin; the counts add up to the dimension

    Raises:
        InvalidParameterException: If the bin width is not positive
        ProblemTooLargeException: If the matrix exceeds the dense range
    """
    if not bin_width > 0:
        raise InvalidParameterException("bin width must be positive")
    if hamiltonian.dim > 1 << settings.full_space_max_sites:
        raise ProblemTooLargeException(f"dimension {hamiltonian.dim} too large for dense DOS")
    energies = _eigh(hamiltonian.dense(), eigvals_only=True)
    lower = math.floor(energies[0] / bin_width) * bin_width
    n_bins = max(1, int(math.ceil((energies[-1] - lower) / bin_width)))
    edges = lower + bin_width * np.arange(n_bins + 1)
    counts, edges = np.histogram(energies, bins=edges)
    return DensityOfStates(edges=edges, counts=counts)


def analyze_manifolds(params: ModelParams) -> List[Manifold]:
    """Group the eigenstates of the full Hamiltonian into ν-manifolds.

    Raises:
        InvalidParameterException: If m != 2 or Δ is infinite
        ProblemTooLargeException: If N exceeds the oracle range
    """
    if params.m != 2 or params.is_perfect_blockade:
        raise InvalidParameterException("manifold analysis needs m = 2 and a finite delta")
    if params.n_sites > settings.oracle_max_sites:
        raise ProblemTooLargeException(
            f"manifold analysis limited to N <= {settings.oracle_max_sites}"
        )
    hamiltonian = full_hamiltonian(params)
    energies, vectors = _eigh(hamiltonian.dense())
    configs = np.arange(hamiltonian.dim, dtype=np.int64)
    interaction = (np.abs(vectors) ** 2).T @ (params.delta * nu_array(configs, params.n_sites))
    labels = np.rint(interaction / params.delta).astype(int)

    manifolds = []
    for nu in np.unique(labels):
        members = energies[labels == nu]
        manifolds.append(
            Manifold(
                nu=int(nu),
                count=int(members.size),
                centre=float(members.mean()),
                lower=float(members.min()),
                upper=float(members.max()),
            )
        )
    for i in range(len(manifolds) - 1):
        if manifolds[i].upper >= manifolds[i + 1].lower:
            manifolds[i] = replace(manifolds[i], overlaps_next=True)
            logger.warning(f"Manifolds nu={manifolds[i].nu} and nu={manifolds[i + 1].nu} overlap")
    logger.info(f"Spectrum N={params.n_sites} delta={params.delta}: {len(manifolds)} manifolds")
    return manifolds
