"""Sectored antenna model: two-level pattern, gains, stochastic transmit gain.

The beam is rotationally symmetric about its axis: gain ``main_gain``
inside the half-beamwidth cone (boundary included) and ``side_gain``
elsewhere.  The square planar array with ``n_elements`` elements maps to
main gain N and beamwidth sqrt(3/N); the side-lobe level then follows
from preserving the total radiated power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import WALL_XP, WALL_XN, WALL_YP, WALL_YN, CEILING, FLOOR


@dataclass(frozen=True)
class AntennaPattern:
    main_gain: float
    side_gain: float
    beamwidth: float

    @property
    def is_isotropic(self) -> bool:
        return self.main_gain == self.side_gain


def upa_pattern(n_elements: int) -> AntennaPattern:
    """Two-level pattern equivalent of a square N-element planar array."""
    if n_elements < 1:
        raise ValueError("element count must be >= 1")
    n = float(n_elements)
    width = np.sqrt(3.0 / n)
    side = n + (1.0 - n) / np.cos(width / 4.0) ** 2
    return AntennaPattern(main_gain=n, side_gain=float(side), beamwidth=float(width))


def gain(pattern: AntennaPattern, off_axis):
    """Pattern gain at an off-axis angle in [0, pi]."""
    off_axis = np.asarray(off_axis, dtype=float)
    return np.where(off_axis <= pattern.beamwidth / 2.0,
                    pattern.main_gain, pattern.side_gain)


def off_axis_cos(beam_az, beam_el, ray_az, ray_el):
    """Cosine of the angle between a beam axis and a ray direction."""
    return (np.cos(beam_el) * np.cos(ray_el)
            + np.sin(beam_el) * np.sin(ray_el) * np.cos(ray_az - beam_az))


def receive_off_axis(beam_az, beam_el, ray_az, ray_el):
    """Off-axis angle of an incoming ray at the receive antenna."""
    return np.arccos(np.clip(off_axis_cos(beam_az, beam_el, ray_az, ray_el),
                             -1.0, 1.0))


def transmit_off_axis(beam_az, beam_el, ray_az, ray_el):
    """Off-axis angle at the transmitter of the ray toward the receiver.

    ``ray_*`` orient the transmitter as seen from the receiver; the
    departing ray is the antipode, hence the sign flip.
    """
    return np.arccos(np.clip(-off_axis_cos(beam_az, beam_el, ray_az, ray_el),
                             -1.0, 1.0))


# Main-lobe direction of the phantom transmitter mirrored across each
# surface: walls flip the azimuth about their normal plane, ceiling and
# floor flip the elevation.
def phantom_beam(beam_az, beam_el, surface):
    surface = np.asarray(surface)
    beam_az = np.asarray(beam_az, dtype=float)
    beam_el = np.asarray(beam_el, dtype=float)
    az = np.where((surface == WALL_XP) | (surface == WALL_XN), np.pi - beam_az,
                  np.where((surface == WALL_YP) | (surface == WALL_YN),
                           -beam_az, beam_az))
    el = np.where((surface == CEILING) | (surface == FLOOR),
                  np.pi - beam_el, beam_el)
    return az, el


def mainlobe_hit_probability(n_elements: int) -> float:
    """Chance a uniformly oriented beam covers a given direction."""
    if n_elements < 1:
        raise ValueError("element count must be >= 1")
    return float(np.sin(np.sqrt(3.0 / n_elements) / 4.0) ** 2)


def sample_tx_gain(pattern: AntennaPattern, p_hit: float, rng, size=None):
    """Two-point transmit gain: main lobe with probability ``p_hit``."""
    u = rng.uniform(0.0, 1.0, size=size)
    return np.where(u < p_hit, pattern.main_gain, pattern.side_gain)
