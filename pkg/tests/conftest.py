"""Shared test fixtures."""

import math
from pathlib import Path

import pytest
from scipy import constants

from hetnoise.models import (
    TWO_PI,
    BeatConfig,
    DetectorModel,
    DetectorPair,
    FieldSpec,
    OpticalPath,
    SimConfig,
    SpectrumConfig,
)

CARRIER = TWO_PI * constants.c / 1064e-9
HET_OMEGA = TWO_PI * 3e6


@pytest.fixture
def lo_field() -> FieldSpec:
    """Local oscillator carrying 1e16 photons/s."""
    return FieldSpec(frequency=CARRIER, flux_amplitude=1e8)


@pytest.fixture
def signal_field() -> FieldSpec:
    """Weak signal 3 MHz above the LO carrying 1e8 photons/s."""
    return FieldSpec(frequency=CARRIER + HET_OMEGA, flux_amplitude=1e4)


@pytest.fixture
def dark_signal() -> FieldSpec:
    """Signal mode with no photons, 3 MHz above the LO."""
    return FieldSpec(frequency=CARRIER + HET_OMEGA, flux_amplitude=0.0)


@pytest.fixture
def heterodyne() -> BeatConfig:
    return BeatConfig(het_frequency=HET_OMEGA)


@pytest.fixture
def homodyne() -> BeatConfig:
    return BeatConfig(het_frequency=0.0, relative_phase=math.pi / 2)


@pytest.fixture
def ideal_path() -> OpticalPath:
    return OpticalPath()


@pytest.fixture
def lab_path() -> OpticalPath:
    """70% collection efficiency and 0.985 visibility on both detectors."""
    return OpticalPath(collection_efficiency=0.7, visibility=(0.985, 0.985))


@pytest.fixture
def detectors() -> DetectorPair:
    """Ideal detectors with 10 ns rectangular pulses of one electron."""
    return (DetectorModel(), DetectorModel())


@pytest.fixture
def small_sim() -> SimConfig:
    """2^16 samples at 100 MHz, one trial."""
    return SimConfig(sample_rate=100e6, duration=2**16 / 100e6, master_seed=1234)


@pytest.fixture
def spectrum_cfg() -> SpectrumConfig:
    return SpectrumConfig(rbw=100e3, span=(0.5e6, 10e6))


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Temporary artifact directory."""
    return tmp_path / "out"


@pytest.fixture
def minimal_scenario_text() -> str:
    """Smallest valid scenario file."""
    return "name: minimal\nlocal_oscillator:\n  power_mw: 4.0\n"
