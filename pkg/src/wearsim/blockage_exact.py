"""Deterministic blockage tests on the receiver's horizontal plane.

All positions here are planar (x, y) and expressed relative to the
reference receiver, which sits at the origin.  A transmitter (real or
phantom) is blocked by a body circle when the segment from the origin
to the transmitter's projection passes through the open disk of the
circle.  Tangency does not block: comparisons carry a 1e-9 relative
guard so that a body grazed exactly on its rim (the standoff-zero
configuration, where this happens with positive probability) counts as
clear.  Wearables overlapped by a circle are blocked as a consequence,
since the segment endpoint then lies inside the disk.
"""

from __future__ import annotations

import numpy as np

TANGENCY_GUARD = 1.0 - 1e-9
_TINY = 1e-300


def blocking_cones(circles_xy, diameter):
    """Angular cones subtended at the receiver by each body circle.

    Returns ``(angle, half_width, distance)`` arrays over the circle
    axis; the half-width saturates at pi/2 when a circle touches the
    receiver.
    """
    circles_xy = np.asarray(circles_xy, dtype=float)
    d = np.linalg.norm(circles_xy, axis=-1)
    angle = np.arctan2(circles_xy[..., 1], circles_xy[..., 0])
    half = np.arcsin(np.minimum(diameter / (2.0 * np.maximum(d, _TINY)), 1.0))
    return angle, half, d


def occlusion_matrix(tx_xy, circles_xy, diameter):
    """Pairwise blocked test: segment origin->tx against each circle.

    ``tx_xy`` has shape (..., M, 2) and ``circles_xy`` (..., C, 2);
    the result is boolean (..., M, C).  Distance from a circle center
    to the segment is computed through the clamped foot point, which
    stays well conditioned near tangency.
    """
    tx_xy = np.asarray(tx_xy, dtype=float)
    circles_xy = np.asarray(circles_xy, dtype=float)
    u = tx_xy[..., :, None, :]
    c = circles_xy[..., None, :, :]
    r2 = np.maximum(np.einsum("...i,...i->...", u, u), _TINY)
    d2 = np.einsum("...i,...i->...", c, c)
    dot = np.einsum("...i,...i->...", u, c)
    t = np.clip(dot / r2, 0.0, 1.0)
    dist2 = d2 - t * (2.0 * dot - t * r2)
    q = diameter / 2.0
    return dist2 < q * q * TANGENCY_GUARD


def classify(tx_xy, circles_xy, diameter):
    """Blockage indicator per transmitter: 1 = unblocked, 0 = blocked."""
    blocked = occlusion_matrix(tx_xy, circles_xy, diameter).any(axis=-1)
    return ~blocked


def segment_occlusion(start_xy, end_xy, circles_xy, diameter):
    """Blocked test for arbitrary segments against each circle.

    ``start_xy`` and ``end_xy`` have shape (..., M, 2), ``circles_xy``
    (..., C, 2); returns boolean (..., M).  Same open-disk convention
    as :func:`occlusion_matrix`.
    """
    s = np.asarray(start_xy, dtype=float)[..., :, None, :]
    e = np.asarray(end_xy, dtype=float)[..., :, None, :]
    c = np.asarray(circles_xy, dtype=float)[..., None, :, :]
    u = e - s
    v = c - s
    r2 = np.maximum(np.einsum("...i,...i->...", u, u), _TINY)
    dot = np.einsum("...i,...i->...", v, u)
    d2 = np.einsum("...i,...i->...", v, v)
    t = np.clip(dot / r2, 0.0, 1.0)
    dist2 = d2 - t * (2.0 * dot - t * r2)
    q = diameter / 2.0
    return (dist2 < q * q * TANGENCY_GUARD).any(axis=-1)


def wall_path_blocked(rx_xy, tx_xy, crossing_xy, circles_xy, diameter):
    """Blockage of a single-bounce wall path, folded at the bounce point.

    ``crossing_xy`` is where the unfolded receiver-to-phantom segment
    meets the wall.  Being a fixed point of the wall mirror, both
    physical legs (receiver to bounce, bounce to the real transmitter
    ``tx_xy``) can be tested directly against the real circles.
    ``rx_xy`` broadcasts; returns the indicator (1 = unblocked).
    """
    rx = np.broadcast_to(np.asarray(rx_xy, dtype=float),
                         np.asarray(crossing_xy).shape)
    leg_rx = segment_occlusion(rx, crossing_xy, circles_xy, diameter)
    leg_tx = segment_occlusion(crossing_xy, tx_xy, circles_xy, diameter)
    return ~(leg_rx | leg_tx)


def body_spans(tx_xy, circles_xy, diameter):
    """Entry/exit distances of each circle along each origin->tx segment.

    For pairs where the circle does not reach the segment's carrier
    line the span is empty (entry > exit is not guaranteed; use only
    where the occlusion matrix is true).  Returns ``(entry, exit)``
    measured from the receiver.
    """
    tx_xy = np.asarray(tx_xy, dtype=float)
    circles_xy = np.asarray(circles_xy, dtype=float)
    u = tx_xy[..., :, None, :]
    c = circles_xy[..., None, :, :]
    r2 = np.maximum(np.einsum("...i,...i->...", u, u), _TINY)
    r = np.sqrt(r2)
    d2 = np.einsum("...i,...i->...", c, c)
    dot = np.einsum("...i,...i->...", u, c)
    q = diameter / 2.0
    cross2 = np.maximum(r2 * d2 - dot * dot, 0.0)
    s = np.sqrt(np.maximum(q * q * r2 - cross2, 0.0))
    entry = (dot - s) / r
    exit_ = (dot + s) / r
    return entry, exit_


def ceiling_blocked(tx_xy, circles_xy, direct_blockers, a_len, b_len, diameter):
    """Blockage of the ceiling bounce given the direct-path blockers.

    A body that blocks the direct path also blocks the ceiling bounce
    when it stands within ``a_len`` of the receiver or within ``b_len``
    of the transmitter (both along the link).  ``direct_blockers`` is
    the pairwise occlusion matrix of the direct path.  Returns the
    indicator (1 = ceiling path unblocked).
    """
    entry, exit_ = body_spans(tx_xy, circles_xy, diameter)
    r = np.linalg.norm(np.asarray(tx_xy, dtype=float), axis=-1)
    near_rx = entry < a_len[..., :, None]
    near_tx = (r[..., :, None] - exit_) < b_len[..., :, None]
    blocked = (direct_blockers & (near_rx | near_tx)).any(axis=-1)
    return ~blocked


def floor_blocked(direct_indicator):
    """Floor bounce is blocked exactly when the direct path is."""
    return np.asarray(direct_indicator).copy()
