"""Cuboid enclosure geometry: mirror images, incidence angles, projections.

Coordinates are enclosure-centered: x along the length L, y along the
width W, z along the height H, origin at the cuboid center.  The six
reflecting surfaces are enumerated in a fixed order shared by every
module:

    1: wall x = +L/2     2: wall x = -L/2
    3: wall y = +W/2     4: wall y = -W/2
    5: ceiling z = +H/2  6: floor z = -H/2

Arrays index surfaces 0..5 in that order.  All functions broadcast over
leading axes; points are ndarrays with a trailing axis of length 3 (or
2 for planar points).  Angles are radians throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WALL_XP, WALL_XN, WALL_YP, WALL_YN, CEILING, FLOOR = range(6)

# axis mirrored by each surface (x, x, y, y, z, z)
MIRROR_AXIS = np.array([0, 0, 1, 1, 2, 2])
_MIRROR_AXIS = MIRROR_AXIS
# plane offset along that axis, in units of the full dimension:
# image coordinate = sign * dim - coordinate
MIRROR_SIGN = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
_MIRROR_SIGN = MIRROR_SIGN

COINCIDENT_TOL = 1e-9


@dataclass(frozen=True)
class Enclosure:
    """Cuboid room of length x width x height, origin at the center."""

    length: float
    width: float
    height: float

    def __post_init__(self):
        for name in ("length", "width", "height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"enclosure {name} must be > 0")

    @property
    def dims(self) -> np.ndarray:
        return np.array([self.length, self.width, self.height])

    @property
    def half(self) -> np.ndarray:
        return self.dims / 2.0

    def contains(self, p, strict: bool = True) -> np.ndarray:
        """True where ``p`` lies inside the cuboid (strictly, by default)."""
        p = np.asarray(p, dtype=float)
        if strict:
            return np.all(np.abs(p) < self.half, axis=-1)
        return np.all(np.abs(p) <= self.half, axis=-1)

    def require_inside(self, p, what: str = "point") -> None:
        if not np.all(self.contains(p)):
            raise ValueError(f"{what} must lie strictly inside the enclosure")


def image_points(tx, enc: Enclosure, check: bool = True) -> np.ndarray:
    """Mirror images of ``tx`` across the six surfaces.

    Returns an array of shape ``tx.shape[:-1] + (6, 3)``; images lie
    outside the cuboid by construction.
    """
    tx = np.asarray(tx, dtype=float)
    if check:
        enc.require_inside(tx, "transmitter")
    out = np.broadcast_to(tx[..., None, :], tx.shape[:-1] + (6, 3)).copy()
    offsets = _MIRROR_SIGN * enc.dims[_MIRROR_AXIS]
    idx = np.arange(6)
    out[..., idx, _MIRROR_AXIS] = offsets - out[..., idx, _MIRROR_AXIS]
    return out


def mirror_xy(p_xy, enc: Enclosure, wall: int) -> np.ndarray:
    """Planar mirror image across one of the four walls (0..3)."""
    if wall not in (WALL_XP, WALL_XN, WALL_YP, WALL_YN):
        raise ValueError(f"wall index must be 0..3, got {wall}")
    p_xy = np.asarray(p_xy, dtype=float)
    out = p_xy.copy()
    axis = _MIRROR_AXIS[wall]
    out[..., axis] = _MIRROR_SIGN[wall] * enc.dims[axis] - out[..., axis]
    return out


def receiver_ceiling_image(rx, enc: Enclosure) -> np.ndarray:
    """Mirror image of the receiver across the ceiling plane."""
    rx = np.asarray(rx, dtype=float)
    enc.require_inside(rx, "receiver")
    out = rx.copy()
    out[..., 2] = enc.height - out[..., 2]
    return out


def link_lengths(tx, rx, images=None, enc: Enclosure | None = None):
    """Direct and reflected link lengths from ``tx`` to ``rx``.

    Returns ``(r, r_img)`` with ``r_img`` of shape ``(..., 6)``.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    if images is None:
        images = image_points(tx, enc)
    r = np.linalg.norm(tx - rx, axis=-1)
    r_img = np.linalg.norm(images - rx[..., None, :], axis=-1)
    return r, r_img


def incidence_angles(tx, rx, enc: Enclosure, check: bool = True) -> np.ndarray:
    """Angles of incidence of the six single-bounce reflections.

    Each angle is measured between the incident ray and the surface
    normal; equivalently ``arccos`` of the mirrored-axis offset of the
    image over the image-to-receiver distance.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    if check:
        enc.require_inside(tx, "transmitter")
        enc.require_inside(rx, "receiver")
        if np.any(np.linalg.norm(tx - rx, axis=-1) < COINCIDENT_TOL):
            raise ValueError("transmitter and receiver coincide")
    images = image_points(tx, enc, check=False)
    _, r_img = link_lengths(tx, rx, images=images)
    offset = np.abs(images[..., np.arange(6), _MIRROR_AXIS] - rx[..., _MIRROR_AXIS])
    return np.arccos(np.clip(offset / r_img, -1.0, 1.0))


def project_xy(p) -> np.ndarray:
    """Projection onto the horizontal plane (drops z)."""
    return np.asarray(p, dtype=float)[..., :2]


def planar_distance(p, rx) -> np.ndarray:
    """Horizontal-plane distance between the projections of two points."""
    return np.linalg.norm(project_xy(p) - project_xy(rx), axis=-1)


def ray_orientation(tx, rx):
    """Elevation and azimuth of ``tx`` as seen from ``rx``.

    Elevation is measured from the +z axis (``arccos`` of the height
    difference over the distance); azimuth is the planar ``atan2``.
    Returns ``(elevation, azimuth)``.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    d = tx - rx
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < COINCIDENT_TOL):
        raise ValueError("cannot orient a zero-length ray")
    elev = np.arccos(np.clip(d[..., 2] / r, -1.0, 1.0))
    azim = np.arctan2(d[..., 1], d[..., 0])
    return elev, azim
