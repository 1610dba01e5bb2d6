"""Unit tests for the adiabatically eliminated model."""
import math

import numpy as np
import pytest

from src.core.errors import InvalidParameterException
from src.models.params import ModelParams, TimeGrid
from src.services.effective import (
    build_effective,
    compare_dynamics,
    relative_deviation,
    validity_check,
)
from src.services.hamiltonian import perfect_blockade_hamiltonian


@pytest.mark.unit
class TestBuildEffective:
    """Unit tests for build_effective."""

    def test_four_site_corrections(self):
        """Test H_eff = H₀⁽⁰⁰⁾ + diag(0, −4/Δ, −1/Δ) on {0000, 0001, 0101}."""
        delta = 25.0
        model = build_effective(ModelParams(n_sites=4, delta=delta))
        assert model.basis.reps.tolist() == [0, 1, 5]
        np.testing.assert_allclose(model.blocks["01"].entries, [[0.0], [2.0], [0.0]])
        np.testing.assert_allclose(model.blocks["02"].entries, [[0.0], [0.0], [math.sqrt(2)]])
        expected = np.array(
            [[0.0, 2.0, 0.0], [2.0, -4.0 / delta, math.sqrt(2)], [0.0, math.sqrt(2), -1.0 / delta]]
        )
        np.testing.assert_allclose(model.h_eff.dense(), expected, atol=1e-14)

    def test_zeroth_order_is_perfect_blockade(self):
        """Test that H₀⁽⁰⁰⁾ equals the perfect-blockade matrix."""
        params = ModelParams(n_sites=10, delta=30.0)
        model = build_effective(params)
        np.testing.assert_allclose(
            model.blocks["00"].entries, perfect_blockade_hamiltonian(params).dense(), atol=1e-14
        )

    def test_corrections_negative_semidefinite(self):
        """Test that both second-order terms lower the energy."""
        model = build_effective(ModelParams(n_sites=10, delta=30.0))
        for correction in model.corrections():
            assert np.linalg.eigvalsh(correction).max() <= 1e-12

    def test_symmetric(self):
        """Test that H_eff is exactly symmetric."""
        assert build_effective(ModelParams(n_sites=9, delta=15.0)).h_eff.is_symmetric()

    def test_vacuum_has_no_double_pair_coupling(self):
        """Test that one flip cannot take the vacuum into ν = 2."""
        model = build_effective(ModelParams(n_sites=8, delta=30.0))
        np.testing.assert_array_equal(model.blocks["02"].entries[0], 0.0)

    def test_needs_finite_delta(self):
        """Test that perfect blockade is rejected."""
        with pytest.raises(InvalidParameterException):
            build_effective(ModelParams(n_sites=8))

    def test_needs_nearest_neighbour_range(self):
        """Test that m = 3 is rejected."""
        with pytest.raises(InvalidParameterException):
            build_effective(ModelParams(n_sites=8, m=3, delta=30.0))


@pytest.mark.unit
class TestValidity:
    """Unit tests for validity_check."""

    def test_separated(self):
        """Test a large Δ against the manifold widths."""
        report = validity_check(ModelParams(n_sites=10, delta=100.0))
        assert report.manifolds_separated
        assert report.width_nu0 > 0 and report.width_nu1 > 0

    def test_overlap_warning(self, caplog):
        """Test that a small Δ is reported."""
        report = validity_check(ModelParams(n_sites=12, delta=2.0))
        assert not report.manifolds_separated
        assert "overlap" in caplog.text


@pytest.mark.unit
class TestCompareDynamics:
    """Unit tests for compare_dynamics."""

    def test_relative_deviation(self):
        """Test normalization by the settled mean of the reference."""
        times = np.linspace(0.0, 10.0, 11)
        perfect = np.full(11, 0.2)
        effective = perfect.copy()
        effective[3] += 0.01
        assert relative_deviation(times, perfect, effective) == pytest.approx(0.05)

    def test_relative_deviation_ignores_undefined(self):
        """Test that NaN samples are skipped."""
        times = np.linspace(0.0, 10.0, 11)
        perfect = np.full(11, 2.0)
        perfect[0] = np.nan
        effective = perfect + 0.1
        assert relative_deviation(times, perfect, effective) == pytest.approx(0.05)

    def test_huge_delta_matches_perfect_blockade(self):
        """Test that Δ = 10⁹ reproduces the perfect-blockade dynamics."""
        report = compare_dynamics(
            ModelParams(n_sites=10, delta=1e9),
            TimeGrid(t_end=10.0, dt=0.05),
            observables=("beta", "g2_2", "C"),
        )
        for name, deviation in report.deviations.items():
            assert deviation < 1e-6, name

    def test_unknown_observable(self):
        """Test that unknown columns are rejected."""
        with pytest.raises(InvalidParameterException):
            compare_dynamics(
                ModelParams(n_sites=6, delta=50.0), TimeGrid(t_end=1.0), observables=("energy",)
            )
