"""Maximally symmetric (bracelet) states spanning the evolution subspace."""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.core.errors import InvalidParameterException
from src.models.params import ModelParams, Sector, SectorKind
from src.models.ring_config import (
    MAX_SITES,
    MIN_SITES,
    Configuration,
    blockaded_mask,
    canonical,
    canonical_array,
    is_canonical_mask,
    nu_array,
    popcount_array,
    reflect,
)

logger = logging.getLogger(__name__)

_ENUMERATION_CHUNK = 1 << 22


@dataclass(frozen=True)
class SymmetricState:
    """Bracelet representative together with its dihedral orbit size."""

    rep: int
    orbit_size: int
    n_sites: int

    @property
    def configuration(self) -> Configuration:
        return Configuration(self.rep, self.n_sites)

    @property
    def excitation_count(self) -> int:
        return bin(self.rep).count("1")


@dataclass(frozen=True, eq=False)
class SymmetricBasis:
    """Ordered, indexed set of symmetric states of one sector.

    States are sorted by (excitation count, representative bitmask).
    """

    params: ModelParams
    sector: Sector
    reps: np.ndarray
    orbit_sizes: np.ndarray
    index: Dict[int, int] = field(repr=False)
    _sorted_reps: np.ndarray = field(repr=False)
    _sorted_order: np.ndarray = field(repr=False)

    @classmethod
    def from_representatives(
        cls, params: ModelParams, sector: Sector, reps: np.ndarray, orbit_sizes: np.ndarray
    ) -> "SymmetricBasis":
        order = np.lexsort((reps, popcount_array(reps)))
        reps = np.ascontiguousarray(reps[order])
        orbit_sizes = np.ascontiguousarray(orbit_sizes[order])
        for array in (reps, orbit_sizes):
            array.setflags(write=False)
        by_value = np.argsort(reps, kind="stable")
        return cls(
            params=params,
            sector=sector,
            reps=reps,
            orbit_sizes=orbit_sizes,
            index={int(r): i for i, r in enumerate(reps)},
            _sorted_reps=reps[by_value],
            _sorted_order=by_value,
        )

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    @property
    def states(self) -> List[SymmetricState]:
        return [
            SymmetricState(int(r), int(o), self.n_sites)
            for r, o in zip(self.reps, self.orbit_sizes)
        ]

    @property
    def excitation_counts(self) -> np.ndarray:
        return popcount_array(self.reps)

    def __len__(self) -> int:
        return int(self.reps.size)

    def __contains__(self, rep: int) -> bool:
        return int(rep) in self.index

    def positions(self, reps: np.ndarray) -> np.ndarray:
        """Basis positions of canonical representatives, -1 where absent."""
        reps = np.asarray(reps, dtype=np.int64)
        if self.reps.size == 0:
            return np.full(reps.shape, -1, dtype=np.int64)
        slot = np.searchsorted(self._sorted_reps, reps)
        slot = np.minimum(slot, self._sorted_reps.size - 1)
        found = self._sorted_reps[slot] == reps
        return np.where(found, self._sorted_order[slot], -1)


def _check_sites(n_sites: int) -> None:
    if not MIN_SITES <= n_sites <= MAX_SITES:
        raise InvalidParameterException(
            f"ring size must lie in [{MIN_SITES}, {MAX_SITES}], got {n_sites}"
        )


def _sector_filter(configs: np.ndarray, n_sites: int, sector: Sector) -> np.ndarray:
    if sector.kind == SectorKind.BLOCKADED:
        return configs[blockaded_mask(configs, sector.value, n_sites)]
    if sector.kind == SectorKind.NU_EQUALS:
        return configs[nu_array(configs, n_sites) == sector.value]
    return configs


def _iter_chunks(n_sites: int) -> Iterator[np.ndarray]:
    total = 1 << n_sites
    for start in range(0, total, _ENUMERATION_CHUNK):
        yield np.arange(start, min(start + _ENUMERATION_CHUNK, total), dtype=np.int64)


@lru_cache(maxsize=32)
def sector_configurations(n_sites: int, sector: Sector) -> np.ndarray:
    """All raw configurations of a sector, sorted ascending (read-only array)."""
    _check_sites(n_sites)
    parts = [_sector_filter(chunk, n_sites, sector) for chunk in _iter_chunks(n_sites)]
    configs = np.concatenate(parts)
    configs.setflags(write=False)
    return configs


@lru_cache(maxsize=32)
def _sector_representatives(n_sites: int, sector: Sector) -> Tuple[np.ndarray, np.ndarray]:
    if sector.kind == SectorKind.ALL:
        parts = []
        for chunk in _iter_chunks(n_sites):
            parts.append(chunk[is_canonical_mask(chunk, n_sites)])
        reps = np.concatenate(parts)
    else:
        configs = sector_configurations(n_sites, sector)
        reps = configs[is_canonical_mask(configs, n_sites)]
    _, orbit_sizes = canonical_array(reps, n_sites)
    return reps, orbit_sizes


def _necklaces(n_sites: int) -> Iterator[int]:
    """Binary necklaces in lexicographic order; a[1] is the most significant bit."""
    a = [0] * (n_sites + 1)

    def generate(t: int, p: int) -> Iterator[int]:
        if t > n_sites:
            if n_sites % p == 0:
                yield sum(bit << (n_sites - i) for i, bit in enumerate(a[1:], start=1))
            return
        a[t] = a[t - p]
        yield from generate(t + 1, p)
        if a[t - p] == 0:
            a[t] = 1
            yield from generate(t + 1, t)

    yield from generate(1, 1)


def _smallest_rotation(bits: int, n_sites: int) -> int:
    mask = (1 << n_sites) - 1
    return min(((bits << l) | (bits >> (n_sites - l))) & mask for l in range(n_sites))


def generate_bracelets(n_sites: int, method: str = "enumerate") -> List[SymmetricState]:
    """All dihedral orbit representatives of N-bit configurations.

    Args:
        n_sites: Ring size N
        method: ``"enumerate"`` filters all 2^N configurations; ``"necklace"`` walks the
            necklaces recursively and keeps those not exceeding their mirror image

    Returns:
        Symmetric states sorted by (excitation count, representative)
    """
    _check_sites(n_sites)
    if method == "enumerate":
        reps, orbit_sizes = _sector_representatives(n_sites, Sector.all())
    elif method == "necklace":
        found = []
        for necklace in _necklaces(n_sites):
            mirrored = reflect(Configuration(necklace, n_sites))
            mirror_min = _smallest_rotation(mirrored.bits, n_sites)
            if necklace <= mirror_min:
                found.append(necklace)
        reps = np.array(found, dtype=np.int64)
        _, orbit_sizes = canonical_array(reps, n_sites)
    else:
        raise InvalidParameterException(f"unknown bracelet generation method '{method}'")
    params = ModelParams(n_sites=n_sites)
    return SymmetricBasis.from_representatives(params, Sector.all(), reps, orbit_sizes).states


def build_basis(params: ModelParams, sector: Optional[Sector] = None) -> SymmetricBasis:
    """Filtered, sorted and indexed symmetric basis of a sector.

    Args:
        params: Model parameters
        sector: Sector restriction; defaults to Blockaded(params.m)

    Returns:
        The symmetric basis

    Raises:
        InvalidParameterException: If a ν sector is requested with m != 2 or ν out of range
    """
    sector = sector or Sector.blockaded(params.m)
    n_sites = params.n_sites
    if sector.kind == SectorKind.NU_EQUALS:
        if params.m != 2:
            raise InvalidParameterException("nu sectors are only defined for m = 2")
        if sector.value > n_sites:
            raise InvalidParameterException(f"nu must lie in [0, {n_sites}]")
    reps, orbit_sizes = _sector_representatives(n_sites, sector)
    basis = SymmetricBasis.from_representatives(params, sector, reps, orbit_sizes)
    logger.info(f"Built symmetric basis N={n_sites} sector={sector}: dim={len(basis)}")
    return basis


def count_blockaded_configs(n_sites: int, m: int) -> int:
    """Number of raw configurations satisfying the blockade constraint (Lucas L_N for m = 2)."""
    _check_sites(n_sites)
    return int(sector_configurations(n_sites, Sector.blockaded(m)).size)


def orbit_check(state: SymmetricState) -> bool:
    """Whether a state's fields agree with :func:`canonical` of its representative."""
    rep, size = canonical(state.configuration)
    return rep.bits == state.rep and size == state.orbit_size
