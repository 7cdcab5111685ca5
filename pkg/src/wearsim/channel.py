"""Coherent multipath power, SINR, and spectral efficiency."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class PathComponent:
    """One direct or reflected link entering the coherent sum.

    ``amplitude`` is the blockage-weighted gain-over-distance factor
    (1/m), ``phase_offset`` the excess phase relative to the direct
    path (0 for the direct path itself) and ``polarization`` the
    2-vector field term (reflection matrix already applied for bounced
    paths).
    """

    amplitude: float
    phase_offset: float
    polarization: np.ndarray


def coherent_power(tx_power, wavelength, terms):
    """Received power of a coherent sum of 2-vector path terms.

    ``terms`` has shape (..., paths, 2) and already folds amplitude,
    phase and polarization of every path.
    """
    total = np.sum(np.asarray(terms), axis=-2)
    norm2 = np.sum(np.abs(total) ** 2, axis=-1)
    return tx_power * (wavelength / (4.0 * np.pi)) ** 2 * norm2


def received_power(paths: Sequence[PathComponent], tx_power: float,
                   wavelength: float) -> float:
    """Scalar wrapper assembling path terms then summing coherently."""
    terms = np.stack([
        p.amplitude * np.exp(-1j * p.phase_offset)
        * np.asarray(p.polarization, dtype=complex)
        for p in paths
    ])
    return float(coherent_power(tx_power, wavelength, terms))


def noise_power(noise_figure_db: float, noise_psd_dbm_hz: float,
                bandwidth_hz: float) -> float:
    """AWGN power in watts from figure (dB), PSD (dBm/Hz) and bandwidth."""
    return (10.0 ** (noise_figure_db / 10.0)
            * 10.0 ** ((noise_psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz)


def sinr(signal, interference, noise):
    """Signal over interference-plus-noise.

    ``interference`` is the sequence of per-interferer powers (may be
    empty); ``noise`` must be positive.
    """
    total_i = float(np.sum(np.asarray(interference, dtype=float)))
    return np.asarray(signal, dtype=float) / (noise + total_i)


def spectral_efficiency(sinr_linear):
    return np.log2(1.0 + np.asarray(sinr_linear, dtype=float))


def mean_spectral_efficiency(se_samples):
    """Sample mean with its 95% normal-approximation half-width."""
    se_samples = np.asarray(se_samples, dtype=float)
    if se_samples.size < 2:
        raise ValueError("need at least two samples")
    mean = float(se_samples.mean())
    half = float(1.96 * se_samples.std(ddof=1) / np.sqrt(se_samples.size))
    return mean, half


def to_db(x, floor_db=None):
    """Linear power ratio to dB with an optional reporting floor."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(x)
    if floor_db is not None:
        db = np.maximum(db, floor_db)
    return db
