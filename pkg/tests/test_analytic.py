"""Tests for closed-form noise expressions."""

import math

import numpy as np
import pytest
from scipy import constants, integrate

from hetnoise.models import (
    DetectorModel,
    NoiseModel,
    OpticalPath,
    PhotocurrentTrace,
    PulseKind,
    PulseShape,
    SpectrumConfig,
)
from hetnoise.noise.analytic import (
    LagRangeError,
    NoiseDomainError,
    analytic_spectrum,
    autocorr_decomposition,
    cross_correlation,
    detector_autocorr,
    excess_factor,
    floor_difference_db,
    floor_psd,
    lambda_autocorr,
    sampled_shot_variance,
    shot_psd,
    shot_variance,
)

Q = constants.e
HET = 2 * math.pi * 3e6


class TestShotNoise:
    """Tests for shot variance and PSD."""

    def test_shot_variance(self, lo_field, detectors):
        """Test variance is El^2 q^2 / w for two ideal rectangular detectors."""
        expected = lo_field.photon_rate * Q**2 / 10e-9
        assert shot_variance(lo_field, detectors) == pytest.approx(expected)

    def test_variance_scales_with_efficiency(self, lo_field):
        """Test half-efficient detectors halve the variance."""
        full = shot_variance(lo_field, (DetectorModel(), DetectorModel()))
        half = shot_variance(
            lo_field, (DetectorModel(efficiency=0.5), DetectorModel(efficiency=0.5))
        )
        assert half == pytest.approx(full / 2)

    def test_delta_pulse_variance_rejected(self, lo_field):
        """Test delta pulses have no finite variance."""
        delta = DetectorModel(pulse=PulseShape(kind=PulseKind.DELTA, width=0.0))
        with pytest.raises(NoiseDomainError, match="delta"):
            shot_variance(lo_field, (delta, delta))

    def test_sampled_variance_for_delta_pulses(self, lo_field):
        """Test sampled variance of delta pulses is El^2 q^2 fs."""
        delta = DetectorModel(pulse=PulseShape(kind=PulseKind.DELTA, width=0.0))
        variance = sampled_shot_variance(lo_field, (delta, delta), 100e6)
        assert variance == pytest.approx(lo_field.photon_rate * Q**2 * 100e6)

    def test_low_frequency_psd(self, lo_field, detectors):
        """Test the PSD tends to 2 El^2 q^2 well below the pulse bandwidth."""
        assert shot_psd(lo_field, detectors, 0.0) == pytest.approx(
            2 * lo_field.photon_rate * Q**2
        )

    def test_psd_integrates_to_variance(self, lo_field, detectors):
        """Test the one-sided PSD integrates to the time-domain variance."""
        f = np.linspace(0.0, 50e9, 5_000_001)
        area = integrate.trapezoid(shot_psd(lo_field, detectors, f), f)
        assert area == pytest.approx(shot_variance(lo_field, detectors), rel=0.01)


class TestNoiseModels:
    """Tests for model-dependent factors."""

    def test_excess_factor(self, lab_path):
        """Test excess factor for each model and mode."""
        assert excess_factor(NoiseModel.COHERENCE, lab_path, HET) == 1.0
        assert excess_factor(NoiseModel.IMAGE_BAND, lab_path, 0.0) == 1.0
        assert excess_factor(NoiseModel.IMAGE_BAND, lab_path, HET) == pytest.approx(
            1 + 0.7 * 0.985**2
        )
        assert excess_factor(NoiseModel.CLASSICAL_NOISELESS, lab_path, HET) == 0.0

    def test_floor_difference_coherence(self, lab_path):
        """Test the coherence model predicts identical floors."""
        assert floor_difference_db(NoiseModel.COHERENCE, lab_path) == 0.0

    def test_floor_difference_image_band_ideal(self):
        """Test the ideal image-band step is 3.0103 dB."""
        assert floor_difference_db(NoiseModel.IMAGE_BAND, OpticalPath()) == pytest.approx(
            3.0103, abs=1e-4
        )

    def test_floor_difference_image_band_lab(self, lab_path):
        """Test lab efficiency and visibility reduce the step to 2.2510 dB."""
        assert floor_difference_db(NoiseModel.IMAGE_BAND, lab_path) == pytest.approx(
            2.2510, abs=1e-4
        )

    def test_lambda_vanishes_for_coherent_states(self, signal_field, lo_field):
        """Test the normally ordered correlation is zero under coherence."""
        assert lambda_autocorr(NoiseModel.COHERENCE, signal_field, lo_field, 0.0, 0.0) == 0.0

    def test_lambda_image_band_weight(self, signal_field, lo_field):
        """Test the image-band delta weight at zero lag."""
        mean = 0.5 * (signal_field.photon_rate + lo_field.photon_rate)
        value = lambda_autocorr(
            NoiseModel.IMAGE_BAND, signal_field, lo_field, 1.0, 0.0, path=OpticalPath()
        )
        assert value == pytest.approx(mean / 2)
        assert lambda_autocorr(
            NoiseModel.IMAGE_BAND, signal_field, lo_field, 1.0, 1e-9, path=OpticalPath()
        ) == 0.0

    def test_lambda_image_band_homodyne(self, lo_field):
        """Test the image-band excess is absent in homodyne mode."""
        assert lambda_autocorr(NoiseModel.IMAGE_BAND, lo_field, lo_field, 0.0, 0.0) == 0.0


class TestCrossCorrelation:
    """Tests for cross-detector correlation."""

    def test_zero_for_coherence(self, lo_field, detectors):
        """Test cross terms vanish under coherence at every lag."""
        tau = np.array([0.0, 5e-9, 20e-9])
        values = cross_correlation(
            detectors, NoiseModel.COHERENCE, tau, lo=lo_field, het_frequency=HET
        )
        assert values.tolist() == [0.0, 0.0, 0.0]

    def test_image_band_is_negative(self, lo_field, detectors):
        """Test the image-band cross term is minus a quarter of the shot variance."""
        value = cross_correlation(
            detectors, NoiseModel.IMAGE_BAND, 0.0, lo=lo_field, path=OpticalPath(),
            het_frequency=HET,
        )
        assert value == pytest.approx(-shot_variance(lo_field, detectors) / 4)

    def test_image_band_homodyne_is_zero(self, lo_field, detectors):
        """Test no cross term without a beat."""
        assert cross_correlation(detectors, NoiseModel.IMAGE_BAND, 0.0, lo=lo_field) == 0.0

    def test_image_band_needs_lo(self, detectors):
        """Test the image-band beat without an oscillator raises instead of returning 0."""
        with pytest.raises(NoiseDomainError, match="needs the local oscillator"):
            cross_correlation(
                detectors, NoiseModel.IMAGE_BAND, 0.0, path=OpticalPath(), het_frequency=HET
            )

    def test_image_band_needs_path(self, lo_field, detectors):
        """Test the image-band beat without a path raises."""
        with pytest.raises(NoiseDomainError, match="needs the optical path"):
            cross_correlation(
                detectors, NoiseModel.IMAGE_BAND, 0.0, lo=lo_field, het_frequency=HET
            )

    def test_lambda_image_band_needs_path(self, signal_field, lo_field):
        """Test the image-band weight is not computed for an assumed path."""
        with pytest.raises(NoiseDomainError, match="needs the optical path"):
            lambda_autocorr(NoiseModel.IMAGE_BAND, signal_field, lo_field, 0.0, 0.0)

    def test_detector_autocorr_falls_off(self, lo_field):
        """Test single-detector autocorrelation vanishes beyond the pulse width."""
        assert detector_autocorr(lo_field, DetectorModel(), 10e-9) == pytest.approx(0.0)


class TestAnalyticSpectrum:
    """Tests for analytic_spectrum and floor_psd."""

    def test_grid(self, lo_field, detectors, ideal_path, spectrum_cfg):
        """Test bins start at the span edge and are rbw apart."""
        spectrum = analytic_spectrum(
            NoiseModel.COHERENCE, lo_field, detectors, ideal_path, HET, spectrum_cfg
        )
        assert len(spectrum.freqs) == 96
        assert spectrum.freqs[0] == 0.5e6
        assert spectrum.freqs[-1] == pytest.approx(10e6)
        assert spectrum.rbw == 100e3

    def test_image_band_sits_above_coherence(self, lo_field, detectors, ideal_path, spectrum_cfg):
        """Test image-band heterodyne bins are 3.01 dB above coherence bins."""
        coherence = analytic_spectrum(
            NoiseModel.COHERENCE, lo_field, detectors, ideal_path, HET, spectrum_cfg
        )
        image = analytic_spectrum(
            NoiseModel.IMAGE_BAND, lo_field, detectors, ideal_path, HET, spectrum_cfg
        )
        assert image.power_db - coherence.power_db == pytest.approx(
            np.full(96, 10 * math.log10(2))
        )

    def test_electronics_adds_white_floor(self, lo_field, ideal_path):
        """Test electronics PSD adds to the shot floor."""
        detectors = (DetectorModel(electronics_psd=1e-24), DetectorModel(electronics_psd=1e-24))
        bare = floor_psd(NoiseModel.COHERENCE, lo_field, detectors, ideal_path, 0.0, 1e6)
        total = floor_psd(
            NoiseModel.COHERENCE, lo_field, detectors, ideal_path, 0.0, 1e6,
            include_electronics=True,
        )
        assert total - bare == pytest.approx(2e-24)

    def test_lo_doubling_is_3db(self, lo_field, detectors, ideal_path):
        """Test doubling the LO rate raises the floor by 3.0103 dB."""
        cfg = SpectrumConfig(rbw=1e5, span=(0.5e6, 10e6))
        single = analytic_spectrum(
            NoiseModel.COHERENCE, lo_field, detectors, ideal_path, 0.0, cfg
        )
        doubled = analytic_spectrum(
            NoiseModel.COHERENCE,
            lo_field.with_flux(lo_field.flux_amplitude * math.sqrt(2)),
            detectors,
            ideal_path,
            0.0,
            cfg,
        )
        assert doubled.power_db[0] - single.power_db[0] == pytest.approx(3.0103, abs=1e-4)


class TestAutocorrDecomposition:
    """Tests for autocorr_decomposition."""

    @pytest.fixture
    def trace(self) -> PhotocurrentTrace:
        rng = np.random.default_rng(5)
        common = rng.normal(size=4096)
        j1 = 1e-3 + rng.normal(size=4096) + 0.5 * common
        j2 = 1e-3 + rng.normal(size=4096) - 0.5 * common
        return PhotocurrentTrace.from_ports(j1, j2, sample_rate=1e6, seed_used=5)

    @pytest.mark.parametrize("tau", [0.0, 1e-6, 7e-6])
    def test_terms_sum_to_direct(self, trace, tau):
        """Test auto minus cross terms reproduce the J- autocorrelation."""
        breakdown = autocorr_decomposition(trace, tau)
        assert breakdown.relative_mismatch < 1e-12

    def test_lag_in_samples(self, trace):
        """Test tau is converted to whole samples."""
        assert autocorr_decomposition(trace, 3e-6).lag_samples == 3

    def test_anticorrelated_ports(self, trace):
        """Test antiphase common noise shows up as a negative cross term."""
        breakdown = autocorr_decomposition(trace, 0.0)
        assert breakdown.j12_cross == pytest.approx(-0.25, abs=0.1)
        assert breakdown.j12_cross == breakdown.j21_cross

    def test_negative_lag_rejected(self, trace):
        """Test negative lags are rejected."""
        with pytest.raises(LagRangeError, match="non-negative"):
            autocorr_decomposition(trace, -1e-6)

    def test_lag_beyond_trace_rejected(self, trace):
        """Test lags longer than the trace are rejected."""
        with pytest.raises(LagRangeError, match="exceeds"):
            autocorr_decomposition(trace, 1.0)
