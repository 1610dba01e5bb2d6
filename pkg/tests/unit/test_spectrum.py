"""Unit tests for the density of states and the ν-manifolds."""
import math

import numpy as np
import pytest

from src.core.errors import InvalidParameterException, ProblemTooLargeException
from src.models.params import ModelParams
from src.services.hamiltonian import HermitianMatrix, full_hamiltonian
from src.services.spectrum import analyze_manifolds, dos_histogram


@pytest.mark.unit
class TestDensityOfStates:
    """Unit tests for dos_histogram."""

    def test_counts_add_up_to_dimension(self):
        """Test that every eigenvalue lands in a bin."""
        hamiltonian = full_hamiltonian(ModelParams(n_sites=6, delta=10.0))
        dos = dos_histogram(hamiltonian, 0.5)
        assert dos.total == 64
        np.testing.assert_allclose(np.diff(dos.edges), 0.5)
        assert dos.centres.size == dos.counts.size

    def test_single_bin(self):
        """Test that a degenerate spectrum fills one bin."""
        dos = dos_histogram(HermitianMatrix(2.0 * np.eye(3)), 1.0)
        assert dos.counts.tolist() == [3]
        assert dos.edges[0] <= 2.0 <= dos.edges[-1]

    def test_known_eigenvalues(self):
        """Test the bins of eigenvalues 0.5 and 0.5 ± √6."""
        matrix = np.array([[0.0, 2.0, 0.0], [2.0, 0.0, math.sqrt(2)], [0.0, math.sqrt(2), 0.0]])
        dos = dos_histogram(HermitianMatrix(matrix + 0.5 * np.eye(3)), 1.0)
        assert dos.edges[0] == -2.0
        assert dos.counts.tolist() == [1, 0, 1, 0, 1]

    def test_rejects_non_positive_width(self):
        """Test that the bin width must be positive."""
        with pytest.raises(InvalidParameterException):
            dos_histogram(HermitianMatrix(np.eye(2)), 0.0)


@pytest.mark.unit
class TestManifolds:
    """Unit tests for analyze_manifolds."""

    @pytest.fixture(scope="class")
    def manifolds(self):
        return analyze_manifolds(ModelParams(n_sites=8, delta=20.0))

    def test_labels(self, manifolds):
        """Test that labels skip ν = N − 1."""
        assert [m.nu for m in manifolds] == [0, 1, 2, 3, 4, 5, 6, 8]

    def test_counts(self, manifolds):
        """Test the manifold populations."""
        assert sum(m.count for m in manifolds) == 256
        assert manifolds[0].count == 47
        assert manifolds[-1].count == 1

    def test_centres_near_multiples_of_delta(self, manifolds):
        """Test that manifold centres sit close to νΔ."""
        for manifold in manifolds:
            assert abs(manifold.centre - 20.0 * manifold.nu) < 2.0
            assert manifold.lower <= manifold.centre <= manifold.upper

    def test_separated_at_large_delta(self, manifolds):
        """Test that no two manifolds overlap at Δ = 20ε."""
        assert not any(m.overlaps_next for m in manifolds)

    def test_overlap_flag(self, caplog):
        """Test that overlapping manifolds are flagged at small Δ."""
        manifolds = analyze_manifolds(ModelParams(n_sites=8, delta=1.0))
        assert any(m.overlaps_next for m in manifolds)
        assert "overlap" in caplog.text

    def test_needs_finite_delta(self):
        """Test that perfect blockade has no manifold structure."""
        with pytest.raises(InvalidParameterException):
            analyze_manifolds(ModelParams(n_sites=8))

    def test_needs_nearest_neighbour_range(self):
        """Test that m = 3 is rejected."""
        with pytest.raises(InvalidParameterException):
            analyze_manifolds(ModelParams(n_sites=8, m=3, delta=20.0))

    def test_size_limit(self):
        """Test that the full-space analysis is bounded."""
        with pytest.raises(ProblemTooLargeException):
            analyze_manifolds(ModelParams(n_sites=13, delta=20.0))
