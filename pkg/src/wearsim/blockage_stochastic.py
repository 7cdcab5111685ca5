"""Closed-form blockage probabilities and the Bernoulli samplers.

The planar model replaces the geometric occlusion tests with capsule
probabilities: a link of projected length r' is blocked by a body whose
circle center falls inside the stadium of radius D/2 around the link.
Self-body terms (the circles of the link's own wearers) are exact;
other-body terms approximate the circle-center density as uniform over
the footprint minus the receiver's exclusion disk.  The ceiling bounce
couples to the direct path through an auxiliary conditional variable so
that sampled pairs respect "ceiling blocked implies direct blocked".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ClampStats:
    """Counts of probability/argument clamps applied during a run."""

    other_body: int = 0
    ceiling_other: int = 0
    aux_other: int = 0
    signal_arcsin: int = 0
    signal_prob: int = 0

    def merge(self, other: "ClampStats") -> None:
        for name in vars(self):
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def total(self) -> int:
        return sum(vars(self).values())

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class BlockageParams:
    """Geometry constants of the capsule model."""

    diameter: float
    standoff: float
    footprint: float  # L * W

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError("body diameter must be > 0")
        if self.standoff < 0:
            raise ValueError("wearable standoff must be >= 0")

    @property
    def exclusion_radius(self) -> float:
        return self.diameter + self.standoff

    @property
    def usable_area(self) -> float:
        return self.footprint - np.pi * self.exclusion_radius ** 2

    @property
    def overlap_area(self) -> float:
        """Capsule/exclusion-disk overlap beyond the rx end cap."""
        d, rw = self.diameter, self.standoff
        half = np.arcsin((d / 2.0) / (d + rw))
        return ((d + rw) ** 2 * half
                + 0.5 * d * (d + rw) * np.cos(half)
                - np.pi * d * d / 8.0)


def p_self_body(standoff, diameter):
    """Chance one of the link's own bodies cuts the projected link."""
    return np.arcsin(diameter / (2.0 * np.asarray(standoff, dtype=float)
                                 + diameter)) / np.pi


def p_other_body(r_planar, params: BlockageParams, stats: ClampStats | None = None):
    """Chance an unrelated body's circle center lands in the link capsule."""
    raw = (np.asarray(r_planar, dtype=float) * params.diameter
           - params.overlap_area) / params.usable_area
    p = np.clip(raw, 0.0, 1.0)
    if stats is not None:
        stats.other_body += int(np.count_nonzero(raw != p))
    return p


def p_direct_blocked(r_planar, params: BlockageParams, k_people: int,
                     stats: ClampStats | None = None):
    """Blockage probability of a direct (or wall-reflected) interference path.

    Wall bounces reuse the same expression with the phantom-image
    planar distance; the folded capsule makes that an approximation.
    """
    p_ob = p_other_body(r_planar, params, stats)
    p_sb = p_self_body(params.standoff, params.diameter)
    return 1.0 - (1.0 - p_ob) ** max(k_people - 1, 0) * (1.0 - p_sb) ** 2


def _endcap_self_prob(cap_len, params: BlockageParams):
    """Chance a wearer's own circle lands in a capsule of given length."""
    cap_len = np.asarray(cap_len, dtype=float)
    d, rw = params.diameter, params.standoff
    full = np.arcsin(d / (2.0 * rw + d)) / np.pi
    knee = np.sqrt(rw * (d + rw))
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = np.arccos(np.clip((cap_len ** 2 + rw * d + rw * rw)
                                / (cap_len * (2.0 * rw + d)), -1.0, 1.0)) / np.pi
    return np.where(cap_len >= knee, full, np.where(cap_len >= rw, mid, 0.0))


def _ceiling_pair_area(a_len, b_len, params: BlockageParams):
    """Effective area of the two end capsules of a ceiling bounce.

    The receiver-side stadium behaves like the direct-link capsule
    (rectangle aD less the exclusion overlap, with its outer cap
    cancelling the overlap's cap share, hence aD - A); the
    transmitter-side stadium keeps both caps (bD + pi D^2/4).  The
    printed form of this area carries pi D^2/2, which double-counts
    the receiver-side cap already inside the overlap term.
    """
    d = params.diameter
    return ((np.asarray(a_len, dtype=float) + np.asarray(b_len, dtype=float))
            * d - params.overlap_area + np.pi * d * d / 4.0)


def p_ceiling_components(a_len, b_len, params: BlockageParams, k_people: int,
                         stats: ClampStats | None = None):
    """Blocking probabilities of the three ceiling-bounce factors.

    Returns ``(p_sb_rx, p_sb_tx, p_ob)``: self-body at the receiver end
    (capsule length a), self-body at the transmitter end (length b),
    and other-body over both capsules.
    """
    p1 = _endcap_self_prob(a_len, params)
    p2 = _endcap_self_prob(b_len, params)
    raw = _ceiling_pair_area(a_len, b_len, params) / params.usable_area
    hit = np.clip(raw, 0.0, 1.0)
    if stats is not None:
        stats.ceiling_other += int(np.count_nonzero(raw != hit))
    p3 = 1.0 - (1.0 - hit) ** max(k_people - 1, 0)
    return p1, p2, p3


def p_ceiling_blocked(a_len, b_len, params: BlockageParams, k_people: int,
                      stats: ClampStats | None = None):
    p1, p2, p3 = p_ceiling_components(a_len, b_len, params, k_people, stats)
    return 1.0 - (1.0 - p1) * (1.0 - p2) * (1.0 - p3)


def _endcap_conditional_prob(cap_len, params: BlockageParams):
    """Self-body chance on the direct link given the end capsule is clear."""
    cap_len = np.asarray(cap_len, dtype=float)
    d, rw = params.diameter, params.standoff
    full = np.arcsin(d / (2.0 * rw + d))
    knee = np.sqrt(rw * (d + rw))
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.arccos(np.clip((cap_len ** 2 + rw * d + rw * rw)
                                  / (cap_len * (2.0 * rw + d)), -1.0, 1.0))
        mid = (full - theta) / (np.pi - theta)
    return np.where(cap_len >= knee, 0.0, np.where(cap_len >= rw, mid, full / np.pi))


def aux_conditional_probs(a_len, b_len, r_planar, params: BlockageParams,
                          k_people: int, stats: ClampStats | None = None):
    """Conditional direct-path factors given the ceiling bounce is clear."""
    p1 = _endcap_conditional_prob(a_len, params)
    p2 = _endcap_conditional_prob(b_len, params)
    d = params.diameter
    area = params.usable_area
    num = area - np.asarray(r_planar, dtype=float) * d + params.overlap_area
    den = area - _ceiling_pair_area(a_len, b_len, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.clip(num / den, 0.0, 1.0)
    raw = 1.0 - ratio ** max(k_people - 1, 0)
    p3 = np.clip(raw, 0.0, 1.0)
    if stats is not None:
        stats.aux_other += int(np.count_nonzero((num / den < 0.0)
                                                | (num / den > 1.0)))
    return p1, p2, p3


def sample_direct_and_ceiling(a_len, b_len, r_planar, params: BlockageParams,
                              k_people: int, rng,
                              stats: ClampStats | None = None):
    """Joint Bernoulli draw of (direct, ceiling) indicators for one path.

    The ceiling indicator is the product of its three factors; the
    direct indicator multiplies the ceiling one by an auxiliary
    conditional draw, reproducing both marginals and the implication
    "ceiling blocked => direct blocked".  Returns float arrays of 0/1.
    """
    c1, c2, c3 = p_ceiling_components(a_len, b_len, params, k_people, stats)
    t1, t2, t3 = aux_conditional_probs(a_len, b_len, r_planar, params,
                                       k_people, stats)
    shape = np.broadcast(np.asarray(a_len), np.asarray(b_len),
                         np.asarray(r_planar)).shape
    draws = rng.uniform(0.0, 1.0, size=(6,) + shape)
    ceiling = ((draws[0] >= c1) & (draws[1] >= c2) & (draws[2] >= c3))
    aux = ((draws[3] >= t1) & (draws[4] >= t2) & (draws[5] >= t3))
    direct = ceiling & aux
    return direct.astype(float), ceiling.astype(float)


def p_signal_wall_blocked(r_image_planar, r0_planar, params: BlockageParams,
                          k_people: int, stats: ClampStats | None = None):
    """Blockage probability of one wall bounce of the intended signal.

    Only the reference body can self-block, over the fold angle set by
    the on-body projected distance; all ``k_people`` others contribute
    through half the unfolded capsule area.  The arcsin argument is
    clamped when the on-body projection exceeds the circle-center ring
    (geometrically impossible for an on-body transmitter, but possible
    with pathological configs).
    """
    d, rw = params.diameter, params.standoff
    ring = 2.0 * rw + d
    r0 = np.asarray(r0_planar, dtype=float)
    arg = r0 / ring
    clipped = np.minimum(arg, 1.0)
    if stats is not None:
        stats.signal_arcsin += int(np.count_nonzero(arg > 1.0))
    p_self = (np.arcsin(clipped) + np.arcsin(d / ring)) / np.pi
    hit = np.clip((np.asarray(r_image_planar, dtype=float) * d
                   - params.overlap_area) / (2.0 * params.usable_area), 0.0, 1.0)
    raw = 1.0 - (1.0 - hit) ** k_people * (1.0 - p_self)
    p = np.clip(raw, 0.0, 1.0)
    if stats is not None:
        stats.signal_prob += int(np.count_nonzero(raw != p))
    return p
