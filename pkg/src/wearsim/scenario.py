"""Random network geometry sampling.

One scene consists of the reference pair (receiver at a configured
location, its on-body transmitter on a sphere of the configured
on-body radius), the reference body circle, and K interfering wearables
with their own body circles, beams and polarization axes.

Sampling draws in a fixed, documented order from a single stream so
that a seed fully determines the batch:

  1. on-body transmitter direction (with rejection when it would leave
     the enclosure), 2. reference circle angle, 3. interferer planar
     positions (rejection against the exclusion disk), 4. interferer
     heights, 5. interferer circle angles, 6. interferer beams,
     7. interferer polarization axes, 8. reference transmitter
     polarization axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .em import sample_polarization
from .geometry import ray_orientation, receiver_ceiling_image

_MAX_REJECT_ROUNDS = 10_000


@dataclass
class SceneBatch:
    """Arrays describing ``n`` independent scenes (leading axis n)."""

    rx: np.ndarray            # (3,)
    tx0: np.ndarray           # (n, 3)
    ref_circle_xy: np.ndarray  # (n, 2)
    pol0_az: np.ndarray       # (n,)
    pol0_el: np.ndarray       # (n,)
    positions: np.ndarray     # (n, K, 3)
    circles_xy: np.ndarray    # (n, K, 2)
    beam_az: np.ndarray       # (n, K)
    beam_el: np.ndarray       # (n, K)
    pol_az: np.ndarray        # (n, K)
    pol_el: np.ndarray        # (n, K)
    tx0_resamples: int = 0

    @property
    def n(self) -> int:
        return self.tx0.shape[0]

    @property
    def k(self) -> int:
        return self.positions.shape[1]

    def all_circles_xy(self) -> np.ndarray:
        """Reference circle followed by the K interferer circles."""
        return np.concatenate([self.ref_circle_xy[:, None, :],
                               self.circles_xy], axis=1)


def _sphere_directions(rng, n):
    az = rng.uniform(0.0, 2.0 * np.pi, size=n)
    el = np.arccos(1.0 - 2.0 * rng.uniform(0.0, 1.0, size=n))
    return az, el


def sample_reference_pair(cfg: ScenarioConfig, rng, n: int):
    """Receiver-anchored on-body transmitter and reference circle.

    Directions that would put the transmitter outside the enclosure are
    resampled; the count is returned for diagnostics.
    """
    rx = np.array(cfg.receiver_xyz)
    enc = cfg.enclosure
    az, el = _sphere_directions(rng, n)
    tx0 = np.empty((n, 3))
    resamples = 0
    alive = np.arange(n)
    for _ in range(_MAX_REJECT_ROUNDS):
        sin_el = np.sin(el)
        cand = rx + cfg.onbody_distance_m * np.stack(
            [sin_el * np.cos(az), sin_el * np.sin(az), np.cos(el)], axis=-1)
        ok = enc.contains(cand)
        tx0[alive[ok]] = cand[ok]
        alive = alive[~ok]
        if alive.size == 0:
            break
        resamples += alive.size
        az, el = _sphere_directions(rng, alive.size)
    else:
        raise RuntimeError("on-body transmitter direction rejection stalled; "
                           "receiver too close to a surface for r_0")
    ring = cfg.body_diameter_m / 2.0 + cfg.wearable_standoff_m
    ang = rng.uniform(0.0, 2.0 * np.pi, size=n)
    ref_circle = rx[:2] + ring * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return rx, tx0, ref_circle, resamples


def sample_interferers(cfg: ScenarioConfig, rng, n: int):
    """K wearables uniform on the footprint minus the exclusion disk."""
    k = cfg.k_people
    rx = np.array(cfg.receiver_xyz)
    half_l, half_w = cfg.length_m / 2.0, cfg.width_m / 2.0
    excl2 = (cfg.body_diameter_m + cfg.wearable_standoff_m) ** 2
    xy = np.empty((n, k, 2))
    flat = xy.reshape(-1, 2)
    alive = np.arange(flat.shape[0])
    for _ in range(_MAX_REJECT_ROUNDS):
        cand = rng.uniform([-half_l, -half_w], [half_l, half_w],
                           size=(alive.size, 2))
        ok = ((cand[:, 0] - rx[0]) ** 2 + (cand[:, 1] - rx[1]) ** 2) > excl2
        flat[alive[ok]] = cand[ok]
        alive = alive[~ok]
        if alive.size == 0:
            break
    else:
        raise RuntimeError("interferer placement rejection stalled")
    z = rng.uniform(cfg.wearable_height_low_m, cfg.wearable_height_high_m,
                    size=(n, k))
    positions = np.concatenate([xy, z[..., None]], axis=-1)
    ring = cfg.body_diameter_m / 2.0 + cfg.wearable_standoff_m
    ang = rng.uniform(0.0, 2.0 * np.pi, size=(n, k))
    circles = xy + ring * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    beam_az, beam_el = _sphere_directions(rng, (n, k))
    return positions, circles, beam_az, beam_el


def sample_scenes(cfg: ScenarioConfig, rng, n: int) -> SceneBatch:
    """Draw ``n`` full scenes in the documented stream order."""
    rx, tx0, ref_circle, resamples = sample_reference_pair(cfg, rng, n)
    positions, circles, beam_az, beam_el = sample_interferers(cfg, rng, n)
    pol_az, pol_el = sample_polarization(rng, size=(n, cfg.k_people))
    pol0_az, pol0_el = sample_polarization(rng, size=n)
    return SceneBatch(rx=rx, tx0=tx0, ref_circle_xy=ref_circle,
                      pol0_az=pol0_az, pol0_el=pol0_el,
                      positions=positions, circles_xy=circles,
                      beam_az=beam_az, beam_el=beam_el,
                      pol_az=pol_az, pol_el=pol_el,
                      tx0_resamples=resamples)


def steer_reference(cfg: ScenarioConfig, scene: SceneBatch):
    """Main-lobe directions of the reference pair under the policy.

    ``onbody``: both beams along the direct link.  ``ceiling``: the
    receiver aims at the transmitter's ceiling image, the transmitter
    at the receiver's ceiling image.  Returns
    ``(rx_az, rx_el, tx_az, tx_el)`` arrays over scenes.
    """
    rx = scene.rx
    if cfg.steering == "onbody":
        rx_el, rx_az = ray_orientation(scene.tx0, rx)
        tx_el, tx_az = ray_orientation(rx, scene.tx0)
    elif cfg.steering == "ceiling":
        enc = cfg.enclosure
        tx0_ceiling = scene.tx0.copy()
        tx0_ceiling[:, 2] = enc.height - tx0_ceiling[:, 2]
        rx_el, rx_az = ray_orientation(tx0_ceiling, rx)
        rx_ceiling = receiver_ceiling_image(rx, enc)
        tx_el, tx_az = ray_orientation(rx_ceiling, scene.tx0)
    else:
        raise ValueError(f"unknown steering policy {cfg.steering!r}")
    return rx_az, rx_el, tx_az, tx_el
