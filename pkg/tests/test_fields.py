"""Tests for beamsplitter output intensities."""

import logging
import math

import numpy as np
import pytest
from scipy import constants

from hetnoise.models import BeatConfig, FieldSpec, OpticalPath
from hetnoise.optics.fields import (
    OpticsDomainError,
    beat_signal,
    check_strong_lo,
    field_from_power,
    fringe_scan_from_fields,
    output_intensities,
    photon_rate_from_power,
)


class TestPowerConversion:
    """Tests for power to photon-rate conversion."""

    def test_one_milliwatt_at_1064nm(self):
        """Test 1 mW at 1064 nm is about 5.36e15 photons/s."""
        rate = photon_rate_from_power(1e-3, 1064e-9)
        assert rate == pytest.approx(1e-3 * 1064e-9 / (constants.h * constants.c))
        assert rate == pytest.approx(5.356e15, rel=1e-3)

    def test_negative_power_rejected(self):
        """Test negative power is rejected."""
        with pytest.raises(OpticsDomainError, match="power"):
            photon_rate_from_power(-1.0, 1064e-9)

    def test_zero_wavelength_rejected(self):
        """Test zero wavelength is rejected."""
        with pytest.raises(OpticsDomainError, match="wavelength"):
            photon_rate_from_power(1e-3, 0.0)

    def test_field_from_power(self):
        """Test the built field carries the converted rate and shifted carrier."""
        field = field_from_power(4e-3, 1064e-9, frequency_offset=1e6)
        assert field.photon_rate == pytest.approx(photon_rate_from_power(4e-3, 1064e-9))
        assert field.frequency == pytest.approx(2 * math.pi * constants.c / 1064e-9 + 1e6)


class TestBeatSignal:
    """Tests for beat_signal."""

    def test_quadratures(self):
        """Test in-phase and quadrature terms."""
        assert beat_signal(2.0, 3.0, math.pi, 0.0) == pytest.approx(2.0)
        assert beat_signal(2.0, 3.0, math.pi, 0.5) == pytest.approx(3.0)


class TestOutputIntensities:
    """Tests for output_intensities."""

    def test_energy_conservation(self, signal_field, lo_field, heterodyne):
        """Test the two ports sum to the input photon rate with equal visibilities."""
        t = np.linspace(0.0, 1e-6, 101)
        i1, i2 = output_intensities(signal_field, lo_field, heterodyne, OpticalPath(), t)
        total = signal_field.photon_rate + lo_field.photon_rate
        assert np.asarray(i1) + np.asarray(i2) == pytest.approx(np.full(101, total))

    def test_ports_in_antiphase(self, signal_field, lo_field, homodyne):
        """Test homodyne at quarter-wave phase puts the full beat on port 1."""
        i1, i2 = output_intensities(signal_field, lo_field, homodyne, OpticalPath(), 0.0)
        common = 0.5 * (signal_field.photon_rate + lo_field.photon_rate)
        cross = signal_field.flux_amplitude * lo_field.flux_amplitude
        assert i1 == pytest.approx(common + cross)
        assert i2 == pytest.approx(common - cross)

    def test_visibility_scales_cross_term(self, signal_field, lo_field, homodyne):
        """Test each port's fringe is scaled by its own visibility."""
        path = OpticalPath(visibility=(0.5, 0.25))
        i1, i2 = output_intensities(signal_field, lo_field, homodyne, path, 0.0)
        common = 0.5 * (signal_field.photon_rate + lo_field.photon_rate)
        cross = signal_field.flux_amplitude * lo_field.flux_amplitude
        assert i1 - common == pytest.approx(0.5 * cross)
        assert common - i2 == pytest.approx(0.25 * cross)

    def test_heterodyne_beats_at_omega(self, signal_field, lo_field, heterodyne):
        """Test the port intensity repeats after one beat period."""
        period = 1.0 / heterodyne.het_frequency_hz
        t = np.array([1e-8, 1e-8 + period])
        i1, _ = output_intensities(signal_field, lo_field, heterodyne, OpticalPath(), t)
        assert i1[0] == pytest.approx(i1[1], rel=1e-9)

    def test_weak_lo_warns(self, lo_field, caplog):
        """Test a signal comparable to the LO logs a warning."""
        signal = FieldSpec(frequency=lo_field.frequency, flux_amplitude=lo_field.flux_amplitude)
        with caplog.at_level(logging.WARNING, logger="hetnoise.optics.fields"):
            assert check_strong_lo(signal, lo_field) is False
        assert "strong-LO" in caplog.text

    def test_strong_lo_is_quiet(self, signal_field, lo_field, caplog):
        """Test a strong LO logs nothing."""
        with caplog.at_level(logging.WARNING, logger="hetnoise.optics.fields"):
            assert check_strong_lo(signal_field, lo_field) is True
        assert caplog.text == ""


class TestFringeScanFromFields:
    """Tests for fringe_scan_from_fields."""

    def test_homodyne_scan_sweeps_phase(self, lo_field):
        """Test homodyne scans cover the requested phase range."""
        signal = FieldSpec(frequency=lo_field.frequency, flux_amplitude=lo_field.flux_amplitude)
        scan = fringe_scan_from_fields(signal, lo_field, BeatConfig(), OpticalPath(), 2, 400)
        assert scan.axis[-1] < 4 * math.pi
        assert scan.axis[1] == pytest.approx(4 * math.pi / 400)
        assert len(scan.intensities) == 2

    def test_heterodyne_scan_sweeps_time(self, signal_field, lo_field, heterodyne):
        """Test heterodyne scans span whole beat periods in time."""
        scan = fringe_scan_from_fields(signal_field, lo_field, heterodyne, OpticalPath(), 3, 300)
        assert scan.axis[1] * 300 == pytest.approx(3 / 3e6)

    def test_contrast_matches_visibility(self, lo_field):
        """Test equal-power fields give fringes with the path visibility."""
        signal = FieldSpec(frequency=lo_field.frequency, flux_amplitude=lo_field.flux_amplitude)
        path = OpticalPath(visibility=(0.9, 0.8))
        scan = fringe_scan_from_fields(signal, lo_field, BeatConfig(), path, 4, 4000)
        for trace, v in zip(scan.intensities, path.visibility):
            contrast = (trace.max() - trace.min()) / (trace.max() + trace.min())
            assert contrast == pytest.approx(v, abs=1e-4)

    def test_empty_scan_rejected(self, signal_field, lo_field, heterodyne):
        """Test a scan needs samples and extent."""
        with pytest.raises(OpticsDomainError):
            fringe_scan_from_fields(signal_field, lo_field, heterodyne, OpticalPath(), 0, 100)
