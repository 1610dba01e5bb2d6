"""Unit tests for ring configurations and their symmetry operations."""
import numpy as np
import pytest

from src.models.ring_config import (
    Configuration,
    blockaded,
    blockaded_mask,
    canonical,
    canonical_array,
    excitation_count,
    is_canonical_mask,
    nu,
    nu_array,
    pair_count,
    pair_count_array,
    popcount_array,
    reflect,
    reflect_array,
    rotate,
    rotate_array,
)


@pytest.mark.unit
class TestConfiguration:
    """Unit tests for the configuration value type."""

    def test_string_form_puts_site_zero_last(self):
        """Test that the binary form prints site 0 rightmost."""
        assert str(Configuration(0b0101, 4)) == "0101"
        assert str(Configuration(1, 6)) == "000001"

    def test_bits_must_fit(self):
        """Test that bits beyond N sites are rejected."""
        with pytest.raises(ValueError):
            Configuration(0b10000, 4)

    def test_ring_size_bounds(self):
        """Test that rings smaller than three sites are rejected."""
        with pytest.raises(ValueError):
            Configuration(0, 2)

    def test_occupied_wraps_around(self):
        """Test that site indices are taken modulo N."""
        c = Configuration(0b0001, 4)
        assert c.occupied(0)
        assert c.occupied(4)
        assert not c.occupied(1)


@pytest.mark.unit
class TestSymmetryOperations:
    """Unit tests for rotation, reflection and canonical forms."""

    def test_rotate_moves_excitation(self):
        """Test that rotation by one shifts site k to k + 1."""
        assert rotate(Configuration(0b0001, 4), 1).bits == 0b0010
        assert rotate(Configuration(0b1000, 4), 1).bits == 0b0001

    def test_rotate_full_turn_is_identity(self):
        """Test that N rotations give back the configuration."""
        c = Configuration(0b01101, 5)
        assert rotate(c, 5) == c
        assert rotate(c, -1) == rotate(c, 4)

    def test_reflect(self):
        """Test that reflection maps site k to N - 1 - k."""
        assert reflect(Configuration(0b0001, 4)).bits == 0b1000
        assert reflect(Configuration(0b0011, 4)).bits == 0b1100

    def test_canonical_of_single_excitation(self):
        """Test that every single excitation maps to 0...01 with orbit size N."""
        rep, size = canonical(Configuration(0b0100, 4))
        assert rep.bits == 0b0001
        assert size == 4

    def test_canonical_of_alternating_pattern(self):
        """Test that 0101 on four sites has orbit size 2."""
        rep, size = canonical(Configuration(0b1010, 4))
        assert rep.bits == 0b0101
        assert size == 2

    def test_canonical_of_vacuum(self):
        """Test that the vacuum is its own orbit."""
        rep, size = canonical(Configuration(0, 7))
        assert rep.bits == 0
        assert size == 1

    def test_chiral_orbit_has_full_size(self):
        """Test that a pattern without mirror symmetry has orbit size 2N."""
        _, size = canonical(Configuration(0b001011, 6))
        assert size == 12


@pytest.mark.unit
class TestCounting:
    """Unit tests for excitation and pair counting."""

    def test_excitation_count(self):
        """Test popcount of a configuration."""
        assert excitation_count(Configuration(0b10110, 5)) == 3

    def test_pair_count_nearest_neighbour(self):
        """Test that adjacent pairs are counted cyclically."""
        assert pair_count(Configuration(0b0011, 4), 1) == 1
        assert pair_count(Configuration(0b1001, 4), 1) == 1
        assert nu(Configuration(0b1111, 4)) == 4

    def test_pair_count_half_ring_counts_each_pair_twice(self):
        """Test that l = N/2 counts both orientations of a pair."""
        assert pair_count(Configuration(0b0101, 4), 2) == 2

    def test_blockaded(self):
        """Test the blockade constraint for m = 2 and m = 3."""
        assert blockaded(Configuration(0b0101, 4), 2)
        assert not blockaded(Configuration(0b1001, 4), 2)
        assert blockaded(Configuration(0b001001, 6), 3)
        assert not blockaded(Configuration(0b000101, 6), 3)


@pytest.mark.unit
class TestVectorizedForms:
    """Unit tests checking vectorized forms against the scalar ones."""

    @pytest.mark.parametrize("n_sites", [5, 7, 8])
    def test_all_operations_agree(self, n_sites):
        """Test that every vectorized operation matches its scalar form."""
        configs = np.arange(1 << n_sites, dtype=np.int64)
        reps, sizes = canonical_array(configs, n_sites)
        rotated = rotate_array(configs, 3, n_sites)
        mirrored = reflect_array(configs, n_sites)
        popcounts = popcount_array(configs)
        pairs2 = pair_count_array(configs, 2, n_sites)
        nus = nu_array(configs, n_sites)
        mask3 = blockaded_mask(configs, 3, n_sites)
        for bits in range(1 << n_sites):
            c = Configuration(bits, n_sites)
            rep, size = canonical(c)
            assert reps[bits] == rep.bits
            assert sizes[bits] == size
            assert rotated[bits] == rotate(c, 3).bits
            assert mirrored[bits] == reflect(c).bits
            assert popcounts[bits] == excitation_count(c)
            assert pairs2[bits] == pair_count(c, 2)
            assert nus[bits] == nu(c)
            assert mask3[bits] == blockaded(c, 3)

    def test_is_canonical_mask(self):
        """Test that exactly the orbit representatives are flagged."""
        configs = np.arange(1 << 9, dtype=np.int64)
        reps, _ = canonical_array(configs, 9)
        np.testing.assert_array_equal(is_canonical_mask(configs, 9), reps == configs)

    def test_popcount_beyond_half_word(self):
        """Test popcount for configurations wider than 14 bits."""
        configs = np.array([(1 << 27) | (1 << 14) | 1, (1 << 28) - 1], dtype=np.int64)
        np.testing.assert_array_equal(popcount_array(configs), [3, 28])
