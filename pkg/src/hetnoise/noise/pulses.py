"""Photoelectron current pulse calculus.

A pulse j(t) is causal and carries `area` coulombs. Exponential pulses use
`width` as their time constant.
"""

import math
from typing import Union

import numpy as np

from ..models import FloatArray, PulseKind, PulseShape

ArrayOrFloat = Union[float, FloatArray]

# Exponential kernels are truncated once the remaining charge falls below this fraction.
KERNEL_TAIL = 1e-12


def pulse_energy(pulse: PulseShape) -> float:
    """Integral of j(t)^2 (A^2 s); infinite for delta pulses."""
    if pulse.kind is PulseKind.DELTA:
        return math.inf
    if pulse.kind is PulseKind.RECTANGULAR:
        return pulse.area**2 / pulse.width
    return pulse.area**2 / (2.0 * pulse.width)


def pulse_autocorrelation(pulse: PulseShape, tau: ArrayOrFloat) -> ArrayOrFloat:
    """Integral of j(t') j(t' + tau) dt'; even in tau."""
    lag = np.abs(np.asarray(tau, dtype=np.float64))
    if pulse.kind is PulseKind.DELTA:
        result = np.where(lag == 0, np.inf, 0.0)
    elif pulse.kind is PulseKind.RECTANGULAR:
        height = pulse.area / pulse.width
        result = height**2 * np.clip(pulse.width - lag, 0.0, None)
    else:
        result = pulse_energy(pulse) * np.exp(-lag / pulse.width)
    return float(result) if np.ndim(result) == 0 else result


def pulse_spectrum_sq(pulse: PulseShape, f: ArrayOrFloat) -> ArrayOrFloat:
    """|j(f)|^2, the squared magnitude of the pulse Fourier transform (C^2)."""
    freq = np.asarray(f, dtype=np.float64)
    if pulse.kind is PulseKind.DELTA:
        result = np.full_like(freq, pulse.area**2)
    elif pulse.kind is PulseKind.RECTANGULAR:
        result = pulse.area**2 * np.sinc(freq * pulse.width) ** 2
    else:
        result = pulse.area**2 / (1.0 + (2.0 * math.pi * freq * pulse.width) ** 2)
    return float(result) if np.ndim(result) == 0 else result


def _cumulative_charge(pulse: PulseShape, t: FloatArray) -> FloatArray:
    if pulse.kind is PulseKind.RECTANGULAR:
        return pulse.area * np.clip(t / pulse.width, 0.0, 1.0)
    return pulse.area * -np.expm1(-t / pulse.width)


def discrete_kernel(pulse: PulseShape, sample_rate: float) -> FloatArray:
    """
    Pulse averaged over each sample bin of the simulation grid.

    Tap m is sample_rate times the charge delivered in [m, m+1)/sample_rate,
    so the taps sum to area * sample_rate.
    """
    if pulse.kind is PulseKind.DELTA:
        return np.array([pulse.area * sample_rate])

    dt = 1.0 / sample_rate
    if pulse.kind is PulseKind.RECTANGULAR:
        taps = max(1, math.ceil(pulse.width * sample_rate - 1e-9))
    else:
        taps = max(1, math.ceil(pulse.width * math.log(1.0 / KERNEL_TAIL) * sample_rate))

    edges = np.arange(taps + 1, dtype=np.float64) * dt
    return np.diff(_cumulative_charge(pulse, edges)) * sample_rate


def effective_energy(pulse: PulseShape, sample_rate: float) -> float:
    """
    Integral of the squared bin-averaged pulse.

    This is the variance per unit photoevent rate of a sampled trace; it equals
    pulse_energy for rectangular pulses whose width is a whole number of samples.
    """
    kernel = discrete_kernel(pulse, sample_rate)
    return float(np.sum(kernel**2) / sample_rate)
