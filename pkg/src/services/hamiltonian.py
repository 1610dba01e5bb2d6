"""Assembly of H₀ and H_int in symmetric bases or in the full configuration space.

All matrices are in units of ε = ħΩ, so the laser coupling between configurations that
differ in one site is exactly 1.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from src.core.config import settings
from src.core.errors import InvalidParameterException, ProblemTooLargeException
from src.models.params import ModelParams, Sector
from src.models.ring_config import canonical_array, pair_count_array
from src.services.symmetric_basis import SymmetricBasis, build_basis, sector_configurations

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Real symmetric matrix in units of ε, dense or sparse."""

    data: Union[np.ndarray, sp.csr_matrix]
    basis: Optional[SymmetricBasis] = None

    @property
    def dim(self) -> int:
        return int(self.data.shape[0])

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def dense(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else np.asarray(self.data)

    def sparse(self) -> sp.csr_matrix:
        return self.data if self.is_sparse else sp.csr_matrix(self.data)

    def is_symmetric(self) -> bool:
        if self.is_sparse:
            return (self.data != self.data.T).nnz == 0
        return bool(np.array_equal(self.data, self.data.T))


@dataclass(frozen=True, eq=False)
class SectorBlock:
    """Coupling block ⟨S_b|H₀/ε|S_a⟩ with rows in one sector and columns in another."""

    basis_row: SymmetricBasis
    basis_col: SymmetricBasis
    entries: np.ndarray

    def transpose(self) -> "SectorBlock":
        return SectorBlock(self.basis_col, self.basis_row, self.entries.T.copy())


def h0_block(basis_row: SymmetricBasis, basis_col: SymmetricBasis) -> SectorBlock:
    """Laser coupling between two symmetric bases.

    Entry (b, a) is √(|O_a|/|O_b|) times the number of single-site flips of rep(a) that
    land in the orbit of rep(b), i.e. ⟨S_b|H₀/ε|S_a⟩.

    Args:
        basis_row: Basis indexing the rows
        basis_col: Basis indexing the columns

    Returns:
        The coupling block

    Raises:
        InvalidParameterException: If the bases belong to different ring sizes
    """
    if basis_row.n_sites != basis_col.n_sites:
        raise InvalidParameterException(
            f"ring size mismatch: {basis_row.n_sites} vs {basis_col.n_sites}"
        )
    n_sites = basis_row.n_sites
    entries = np.zeros((len(basis_row), len(basis_col)))
    columns = np.arange(len(basis_col))
    for site in range(n_sites):
        flipped_reps, _ = canonical_array(basis_col.reps ^ (1 << site), n_sites)
        rows = basis_row.positions(flipped_reps)
        hit = rows >= 0
        np.add.at(entries, (rows[hit], columns[hit]), 1.0)

    entries *= np.sqrt(basis_col.orbit_sizes[None, :] / basis_row.orbit_sizes[:, None])
    if basis_row is basis_col:
        entries = 0.5 * (entries + entries.T)
    return SectorBlock(basis_row, basis_col, entries)


def interaction_diagonal(configs: np.ndarray, params: ModelParams) -> np.ndarray:
    """Diagonal of H_int/ε: Σ_l Δ/l⁶ Σ_k n_k n_{k+l} for each configuration."""
    diagonal = np.zeros(configs.shape, dtype=float)
    for l, strength in params.interaction_strengths().items():
        diagonal += strength * pair_count_array(configs, l, params.n_sites)
    return diagonal


def _flip_coupling(configs: np.ndarray, n_sites: int) -> sp.csr_matrix:
    """Single-flip adjacency restricted to a sorted set of configurations."""
    rows, cols = [], []
    positions = np.arange(configs.size)
    for site in range(n_sites):
        flipped = configs ^ (1 << site)
        slot = np.minimum(np.searchsorted(configs, flipped), configs.size - 1)
        hit = configs[slot] == flipped
        rows.append(slot[hit])
        cols.append(positions[hit])
    rows_all = np.concatenate(rows)
    data = np.ones(rows_all.size)
    return sp.csr_matrix(
        (data, (rows_all, np.concatenate(cols))), shape=(configs.size, configs.size)
    )


def full_hamiltonian(params: ModelParams) -> HermitianMatrix:
    """H/ε over all 2^N configurations (sparse).

    Raises:
        InvalidParameterException: If Δ is infinite
        ProblemTooLargeException: If N exceeds the full-space limit
    """
    if params.is_perfect_blockade:
        raise InvalidParameterException("full Hamiltonian requires a finite delta")
    if params.n_sites > settings.full_space_max_sites:
        raise ProblemTooLargeException(
            f"full space limited to N <= {settings.full_space_max_sites}, got {params.n_sites}"
        )
    configs = np.arange(1 << params.n_sites, dtype=np.int64)
    hamiltonian = _flip_coupling(configs, params.n_sites)
    hamiltonian = (hamiltonian + sp.diags(interaction_diagonal(configs, params))).tocsr()
    logger.info(f"Built full Hamiltonian N={params.n_sites} m={params.m}: dim={configs.size}")
    return HermitianMatrix(hamiltonian)


def projected_blockade_hamiltonian(n_sites: int, m: int) -> sp.csr_matrix:
    """P_blk H₀ P_blk restricted to the raw blockaded configurations."""
    configs = sector_configurations(n_sites, Sector.blockaded(m))
    return _flip_coupling(np.asarray(configs), n_sites)


def perfect_blockade_hamiltonian(params: ModelParams) -> HermitianMatrix:
    """Intra-sector H₀/ε on the Blockaded(m) symmetric basis (dense)."""
    basis = build_basis(params, Sector.blockaded(params.m))
    block = h0_block(basis, basis)
    return HermitianMatrix(block.entries, basis=basis)
