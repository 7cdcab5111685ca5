"""Electromagnetic layer: slab reflection coefficients and polarization.

Interior surfaces are homogeneous dielectric plates of thickness
``slab_thickness`` and complex refractive index ``refractive_index``
(negative imaginary part = lossy).  The two-component polarization
abstraction used by the channel model puts the component along the
azimuthal unit vector of the ray first and the component along the
elevation unit vector second; reflection multiplies them by the
(parallel, perpendicular) coefficients for walls and by the swapped
pair for ceiling and floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CEILING, FLOOR


@dataclass(frozen=True)
class SlabMaterial:
    """Dielectric plate: thickness (m), complex index, wavelength (m)."""

    thickness: float
    refractive_index: complex
    wavelength: float

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError("slab thickness must be > 0")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be > 0")


# Named reflectivity presets at 60 GHz (wavelength 5 mm).  The strong
# reflector (|G| ~ 0.8 near normal incidence) is the "high" preset and
# the absorbing plate (|G| ~ 0.3) the "low" one.
MATERIAL_PRESETS = {
    "high": SlabMaterial(thickness=8.8e-3, refractive_index=7.62 - 0.02j,
                         wavelength=5e-3),
    "low": SlabMaterial(thickness=14.2e-3, refractive_index=1.85 - 0.086j,
                        wavelength=5e-3),
}


def slab_coefficients(theta, material: SlabMaterial):
    """Parallel and perpendicular reflection coefficients of the slab.

    Single-interface Fresnel coefficients combined with the internal
    multiple-bounce factor of a plate of finite thickness.  The complex
    square root takes the principal branch (non-negative real part),
    which decays into the slab for lossy indices.

    Returns ``(gamma_par, gamma_perp)`` as complex arrays.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < -1e-12) or np.any(theta > np.pi / 2 + 1e-12):
        raise ValueError("incidence angle must lie in [0, pi/2]")
    n = complex(material.refractive_index)
    cos_t = np.cos(theta)
    root = np.sqrt(n * n - np.sin(theta) ** 2 + 0j)
    g_perp = (cos_t - root) / (cos_t + root)
    g_par = (n * n * cos_t - root) / (n * n * cos_t + root)
    delta = 2.0 * np.pi * material.thickness / material.wavelength * root
    phase = np.exp(-2j * delta)
    num = 1.0 - phase

    def plate(g):
        return g * num / (1.0 - g * g * phase)

    return plate(g_par), plate(g_perp)


def reflection_diag(surface, theta, material: SlabMaterial):
    """Diagonal of the 2x2 reflection matrix for one surface.

    Walls keep the (parallel, perpendicular) order; ceiling and floor
    swap it.  ``surface`` indexes 0..5 and broadcasts against ``theta``.
    Returns ``(first, second)`` complex arrays.
    """
    surface = np.asarray(surface)
    if np.any(surface < 0) or np.any(surface > 5):
        raise ValueError("surface index must be 0..5")
    g_par, g_perp = slab_coefficients(theta, material)
    swap = (surface == CEILING) | (surface == FLOOR)
    first = np.where(swap, g_perp, g_par)
    second = np.where(swap, g_par, g_perp)
    return first, second


def reflection_matrix(surface: int, theta: float, material: SlabMaterial) -> np.ndarray:
    """2x2 diagonal reflection matrix for a single surface and angle."""
    first, second = reflection_diag(surface, theta, material)
    return np.array([[complex(first), 0.0], [0.0, complex(second)]])


def polarization_angle(orient_az, orient_el, ray_az, ray_el):
    """Angle mapping an antenna polarization axis onto a ray's transverse plane.

    The axis is given by azimuth/elevation ``orient_*``; the ray leaves
    the transmitter with azimuth/elevation ``ray_*``.  The angle is the
    arctangent of the axis' projections onto the ray's elevation and
    azimuth unit vectors, so it always lands in [0, pi/2].  A ray
    parallel to the axis (both projections zero) maps to 0.
    """
    num = np.abs(np.cos(ray_el) * np.cos(orient_az - ray_az) * np.sin(orient_el)
                 - np.cos(orient_el) * np.sin(ray_el))
    den = np.abs(np.sin(orient_el) * np.sin(orient_az - ray_az))
    return np.arctan2(num, den)


def polarization_degenerate(orient_az, orient_el, ray_az, ray_el, tol=1e-12):
    """True where the polarization axis is parallel to the ray direction."""
    num = np.abs(np.cos(ray_el) * np.cos(orient_az - ray_az) * np.sin(orient_el)
                 - np.cos(orient_el) * np.sin(ray_el))
    den = np.abs(np.sin(orient_el) * np.sin(orient_az - ray_az))
    return (num < tol) & (den < tol)


def polarization_vector(alpha) -> np.ndarray:
    """Unit 2-vector (cos a, sin a) stacked on a trailing axis."""
    alpha = np.asarray(alpha, dtype=float)
    return np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)


def sample_polarization(rng, size=None):
    """Random polarization axis: uniform azimuth, sine-density elevation.

    Elevation uses the inverse CDF ``arccos(1 - 2u)`` so the axis is
    uniform on the sphere.  Returns ``(azimuth, elevation)``.
    """
    az = rng.uniform(0.0, 2.0 * np.pi, size=size)
    el = np.arccos(1.0 - 2.0 * rng.uniform(0.0, 1.0, size=size))
    return az, el
