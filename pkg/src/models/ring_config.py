"""Occupation patterns on the ring and their symmetry operations.

Bit k of a configuration is the occupation of site k (0-indexed). Every operation has a
scalar form on :class:`Configuration` and a vectorized form on numpy ``int64`` arrays of
bitmasks, used wherever whole sectors are enumerated.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

MIN_SITES = 3
MAX_SITES = 28

_HALF_BITS = 14
_POPCOUNT_TABLE = np.array([bin(x).count("1") for x in range(1 << _HALF_BITS)], dtype=np.int64)


@dataclass(frozen=True)
class Configuration:
    """Cyclic occupation pattern of N sites."""

    bits: int
    n_sites: int

    def __post_init__(self) -> None:
        if not MIN_SITES <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must lie in [{MIN_SITES}, {MAX_SITES}], got {self.n_sites}")
        if self.bits < 0 or self.bits >> self.n_sites:
            raise ValueError(f"bits {self.bits:#x} do not fit into {self.n_sites} sites")

    @property
    def mask(self) -> int:
        return (1 << self.n_sites) - 1

    def occupied(self, site: int) -> bool:
        return bool((self.bits >> (site % self.n_sites)) & 1)

    def __str__(self) -> str:
        # site 0 printed rightmost, matching the bitmask notation
        return format(self.bits, f"0{self.n_sites}b")


def _rotl(bits: int, l: int, n_sites: int) -> int:
    mask = (1 << n_sites) - 1
    return ((bits << l) | (bits >> (n_sites - l))) & mask if l else bits


def rotate(c: Configuration, l: int) -> Configuration:
    """Cyclic shift by ``l`` sites: bit k of the result is bit (k - l) mod N of ``c``."""
    return Configuration(_rotl(c.bits, l % c.n_sites, c.n_sites), c.n_sites)


def reflect(c: Configuration) -> Configuration:
    """Site reversal k -> N - 1 - k."""
    reversed_bits = int(format(c.bits, f"0{c.n_sites}b")[::-1], 2)
    return Configuration(reversed_bits, c.n_sites)


def excitation_count(c: Configuration) -> int:
    return bin(c.bits).count("1")


def pair_count(c: Configuration, l: int) -> int:
    """Number of sites k with both k and k + l excited."""
    return bin(c.bits & _rotl(c.bits, l % c.n_sites, c.n_sites)).count("1")


def nu(c: Configuration) -> int:
    """Number of cyclically adjacent excited pairs (the H_int quantum number for m = 2)."""
    return pair_count(c, 1)


def blockaded(c: Configuration, m: int) -> bool:
    """True when no two excitations sit at cyclic distance smaller than ``m``."""
    return all(pair_count(c, l) == 0 for l in range(1, m))


def canonical(c: Configuration) -> Tuple[Configuration, int]:
    """Dihedral orbit representative (smallest bitmask) and orbit size."""
    mirrored = reflect(c)
    images = {rotate(c, l).bits for l in range(c.n_sites)}
    images.update(rotate(mirrored, l).bits for l in range(c.n_sites))
    return Configuration(min(images), c.n_sites), len(images)


# Vectorized forms


def rotate_array(configs: np.ndarray, l: int, n_sites: int) -> np.ndarray:
    l %= n_sites
    if l == 0:
        return configs.copy()
    mask = np.int64((1 << n_sites) - 1)
    return ((configs << l) | (configs >> (n_sites - l))) & mask


def reflect_array(configs: np.ndarray, n_sites: int) -> np.ndarray:
    out = np.zeros_like(configs)
    for k in range(n_sites):
        out |= ((configs >> k) & 1) << (n_sites - 1 - k)
    return out


def popcount_array(configs: np.ndarray) -> np.ndarray:
    low = configs & ((1 << _HALF_BITS) - 1)
    high = configs >> _HALF_BITS
    return _POPCOUNT_TABLE[low] + _POPCOUNT_TABLE[high]


def pair_count_array(configs: np.ndarray, l: int, n_sites: int) -> np.ndarray:
    return popcount_array(configs & rotate_array(configs, l, n_sites))


def nu_array(configs: np.ndarray, n_sites: int) -> np.ndarray:
    return pair_count_array(configs, 1, n_sites)


def blockaded_mask(configs: np.ndarray, m: int, n_sites: int) -> np.ndarray:
    keep = np.ones(configs.shape, dtype=bool)
    for l in range(1, m):
        keep &= (configs & rotate_array(configs, l, n_sites)) == 0
    return keep


def canonical_array(configs: np.ndarray, n_sites: int) -> Tuple[np.ndarray, np.ndarray]:
    """Representatives and orbit sizes for an array of configurations.

    The orbit size is 2N divided by the number of dihedral elements fixing the configuration.
    """
    configs = np.asarray(configs, dtype=np.int64)
    reps = configs.copy()
    stabilizer = np.zeros(configs.shape, dtype=np.int64)
    for source in (configs, reflect_array(configs, n_sites)):
        for l in range(n_sites):
            image = rotate_array(source, l, n_sites)
            np.minimum(reps, image, out=reps)
            stabilizer += image == configs
    return reps, (2 * n_sites) // stabilizer


def is_canonical_mask(configs: np.ndarray, n_sites: int) -> np.ndarray:
    """Mask of configurations that are their own orbit representative.

    Candidates are discarded as soon as one image is smaller, so most of a full
    enumeration is rejected after a few rotations.
    """
    keep = np.ones(configs.shape, dtype=bool)
    candidates = np.arange(configs.size)
    values = configs
    mirrored = reflect_array(configs, n_sites)
    for source_all in (configs, mirrored):
        for l in range(n_sites):
            if candidates.size == 0:
                return keep
            image = rotate_array(source_all[candidates], l, n_sites)
            smaller = image < values[candidates]
            keep[candidates[smaller]] = False
            candidates = candidates[~smaller]
    return keep
