"""Tests for the tissue and urine constitutive models."""

import numpy as np
import pytest

from uro_fsi.config import LinearElastic, PolynomialEOS
from uro_fsi.errors import DomainError
from uro_fsi.materials import (
    bulk_modulus,
    constrained_modulus,
    dilatational_wave_speed,
    elasticity_matrix,
    eos_pressure,
    hooke_stress,
    initial_compression,
    lame_parameters,
    sound_speed,
)

BLADDER = LinearElastic(E=0.05e6, nu=0.45, rho=1030.0)
URINE = PolynomialEOS()


class TestLinearElastic:
    """Tests for the linear-elastic tissue law."""

    def test_lame_parameters(self):
        """Test λ and G of bladder tissue."""
        lam, shear = lame_parameters(BLADDER)
        assert lam == pytest.approx(155172.41, rel=1e-6)
        assert shear == pytest.approx(17241.38, rel=1e-6)

    def test_moduli(self):
        """Test bulk and constrained moduli agree with λ and G."""
        lam, shear = lame_parameters(BLADDER)
        assert bulk_modulus(BLADDER) == pytest.approx(lam + 2.0 * shear / 3.0)
        assert constrained_modulus(BLADDER) == pytest.approx(lam + 2.0 * shear)

    def test_wave_speed(self):
        """Test the dilatational wave speed of bladder tissue."""
        assert dilatational_wave_speed(BLADDER) == pytest.approx(13.57, abs=0.01)

    def test_uniaxial_strain(self):
        """Test σ for εrr = 0.01 with all other strains zero."""
        sig = hooke_stress([0.01, 0.0, 0.0, 0.0], BLADDER)
        assert sig[0] == pytest.approx(1896.55, abs=0.01)
        assert sig[1] == pytest.approx(1551.72, abs=0.01)
        assert sig[2] == pytest.approx(1551.72, abs=0.01)
        assert sig[3] == 0.0

    def test_shear(self):
        """Test shear stress is G·γ."""
        sig = hooke_stress([0.0, 0.0, 0.0, 0.02], BLADDER)
        assert sig[3] == pytest.approx(0.02 * lame_parameters(BLADDER)[1])
        assert np.all(sig[:3] == 0.0)

    def test_batched(self):
        """Test stresses broadcast over leading axes."""
        eps = np.zeros((5, 4, 4))
        eps[..., 0] = 0.01
        sig = hooke_stress(eps, BLADDER)
        assert sig.shape == (5, 4, 4)
        assert np.allclose(sig[..., 0], 1896.55, atol=0.01)

    def test_matrix_symmetric(self):
        """Test the Hooke matrix is symmetric and positive definite."""
        d = elasticity_matrix(BLADDER)
        assert np.allclose(d, d.T)
        assert np.all(np.linalg.eigvalsh(d) > 0.0)

    def test_bad_shape(self):
        """Test strain vectors need four components."""
        with pytest.raises(ValueError):
            hooke_stress([0.01, 0.0, 0.0], BLADDER)


class TestPolynomialEOS:
    """Tests for the urine equation of state."""

    def test_compression(self):
        """Test the cold curve at μ = 0.01."""
        assert eos_pressure(0.01, 0.0, URINE) == pytest.approx(22_955_450.0)

    def test_reference_state(self):
        """Test zero compression and energy give zero pressure."""
        assert eos_pressure(0.0, 0.0, URINE) == 0.0

    def test_energy_term(self):
        """Test the B0·ρ0·e contribution at μ = 0."""
        assert eos_pressure(0.0, 1000.0, URINE) == pytest.approx(2.8e5)

    def test_tension_cutoff(self):
        """Test tension is limited to the cutoff."""
        assert eos_pressure(-0.01, 0.0, URINE) == pytest.approx(URINE.tension_cutoff)
        assert eos_pressure(-1e-7, 0.0, URINE) == pytest.approx(-220.0)

    def test_vectorised(self):
        """Test arrays of compression states."""
        p = eos_pressure(np.array([0.0, 0.01, -0.01]), np.zeros(3), URINE)
        assert p.shape == (3,)
        assert p[1] > p[0] > p[2]

    def test_non_physical_density(self):
        """Test μ ≤ -1 is rejected."""
        with pytest.raises(DomainError):
            eos_pressure(-1.0, 0.0, URINE)

    def test_sound_speed(self):
        """Test c0 = √(A1/ρ0)."""
        assert sound_speed(URINE) == pytest.approx(1483.24, abs=0.01)

    def test_sound_speed_grows_with_compression(self):
        """Test the cold-curve slope stiffens under compression."""
        c = sound_speed(URINE, np.array([0.0, 0.01]))
        assert c[1] > c[0]

    def test_initial_compression(self):
        """Test μ0 reproduces the initial vesical pressure to first order."""
        mu0 = initial_compression(2062.0, URINE)
        assert mu0 == pytest.approx(2062.0 / 2.2e9)
        assert eos_pressure(mu0, 0.0, URINE) == pytest.approx(2062.0, rel=1e-5)
