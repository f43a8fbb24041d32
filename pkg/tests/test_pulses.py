"""Tests for photoelectron pulse calculus."""

import math

import numpy as np
import pytest
from scipy import constants, integrate

from hetnoise.models import PulseKind, PulseShape
from hetnoise.noise.pulses import (
    discrete_kernel,
    effective_energy,
    pulse_autocorrelation,
    pulse_energy,
    pulse_spectrum_sq,
)

Q = constants.e


class TestPulseEnergy:
    """Tests for pulse_energy and pulse_autocorrelation."""

    def test_rectangular(self):
        """Test rectangular pulse energy is q^2 / w."""
        assert pulse_energy(PulseShape(width=10e-9)) == pytest.approx(Q**2 / 10e-9)

    def test_exponential(self):
        """Test exponential pulse energy is q^2 / (2 tau)."""
        pulse = PulseShape(kind=PulseKind.EXPONENTIAL, width=5e-9)
        assert pulse_energy(pulse) == pytest.approx(Q**2 / 10e-9)

    def test_delta_is_infinite(self):
        """Test delta pulses have unbounded energy."""
        assert math.isinf(pulse_energy(PulseShape(kind=PulseKind.DELTA, width=0.0)))

    def test_autocorrelation_at_zero_is_energy(self):
        """Test zero-lag autocorrelation equals energy."""
        for kind in (PulseKind.RECTANGULAR, PulseKind.EXPONENTIAL):
            pulse = PulseShape(kind=kind, width=10e-9)
            assert pulse_autocorrelation(pulse, 0.0) == pytest.approx(pulse_energy(pulse))

    def test_rectangular_autocorrelation_is_triangle(self):
        """Test rectangular autocorrelation falls linearly to zero at the width."""
        pulse = PulseShape(width=10e-9)
        values = pulse_autocorrelation(pulse, np.array([-5e-9, 5e-9, 10e-9, 20e-9]))
        assert values == pytest.approx([Q**2 / 20e-9, Q**2 / 20e-9, 0.0, 0.0])


class TestPulseSpectrum:
    """Tests for pulse_spectrum_sq."""

    def test_dc_is_area_squared(self):
        """Test |j(0)|^2 = q^2 for every shape."""
        for kind in PulseKind:
            pulse = PulseShape(kind=kind, width=0.0 if kind is PulseKind.DELTA else 10e-9)
            assert pulse_spectrum_sq(pulse, 0.0) == pytest.approx(Q**2)

    def test_rectangular_null(self):
        """Test rectangular spectrum vanishes at 1 / w."""
        assert pulse_spectrum_sq(PulseShape(width=10e-9), 100e6) == pytest.approx(0.0, abs=1e-60)

    @pytest.mark.parametrize("kind", [PulseKind.RECTANGULAR, PulseKind.EXPONENTIAL])
    def test_parseval(self, kind):
        """Test the spectrum integrates to the time-domain energy."""
        pulse = PulseShape(kind=kind, width=10e-9)
        f = np.linspace(-50e9, 50e9, 5_000_001)
        energy = integrate.trapezoid(pulse_spectrum_sq(pulse, f), f)
        assert energy == pytest.approx(pulse_energy(pulse), rel=0.01)


class TestDiscreteKernel:
    """Tests for discrete_kernel and effective_energy."""

    @pytest.mark.parametrize("kind", list(PulseKind))
    def test_kernel_carries_area(self, kind):
        """Test taps sum to area times sample rate."""
        pulse = PulseShape(kind=kind, width=0.0 if kind is PulseKind.DELTA else 25e-9)
        kernel = discrete_kernel(pulse, 100e6)
        assert kernel.sum() == pytest.approx(Q * 100e6, rel=1e-9)

    def test_whole_sample_rectangle_is_one_tap(self):
        """Test a 10 ns rectangle at 100 MHz fills exactly one bin."""
        kernel = discrete_kernel(PulseShape(width=10e-9), 100e6)
        assert len(kernel) == 1

    def test_effective_energy_matches_for_whole_samples(self):
        """Test sampled energy equals the analytic one for whole-sample widths."""
        pulse = PulseShape(width=30e-9)
        assert effective_energy(pulse, 100e6) == pytest.approx(pulse_energy(pulse))

    def test_exponential_kernel_decays(self):
        """Test exponential taps decrease monotonically."""
        kernel = discrete_kernel(PulseShape(kind=PulseKind.EXPONENTIAL, width=20e-9), 100e6)
        assert np.all(np.diff(kernel) < 0)
