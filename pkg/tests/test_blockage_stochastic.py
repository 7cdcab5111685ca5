"""Closed-form blockage probabilities and the coupled sampler."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from wearsim.blockage_stochastic import (BlockageParams, ClampStats,
                                         _ceiling_pair_area,
                                         _endcap_conditional_prob,
                                         _endcap_self_prob,
                                         aux_conditional_probs,
                                         p_ceiling_blocked,
                                         p_ceiling_components,
                                         p_direct_blocked, p_other_body,
                                         p_self_body, p_signal_wall_blocked,
                                         sample_direct_and_ceiling)

D = 0.5
PARAMS = BlockageParams(diameter=D, standoff=0.10, footprint=80.0)


def params_with(standoff):
    return BlockageParams(diameter=D, standoff=standoff, footprint=80.0)


def test_p_self_body_values():
    assert_allclose(p_self_body(0.0, D), 0.5, atol=1e-12)
    assert_allclose(p_self_body(0.10, D), np.arcsin(5.0 / 7.0) / np.pi,
                    rtol=1e-12)
    assert p_self_body(1e9, D) < 1e-9


def test_p_self_body_matches_rotating_circle_mc():
    rng = np.random.default_rng(1)
    for rw in (0.02, 0.10, 0.30):
        ang = rng.uniform(0, 2 * np.pi, 2_000_000)
        ring = D / 2 + rw
        center = ring * np.column_stack([np.cos(ang), np.sin(ang)])
        # long link along +x; center-in-capsule <=> blocked
        t = np.clip(center[:, 0] / 50.0, 0, 1) * 50.0
        dist2 = (center[:, 0] - t) ** 2 + center[:, 1] ** 2
        mc = np.mean(dist2 < (D / 2) ** 2)
        want = p_self_body(rw, D)
        assert abs(mc - want) < 3.5 * np.sqrt(want * (1 - want) / ang.size)


def test_hit_area_against_numeric_integration():
    # the other-body numerator r'*D - A must equal the area where a
    # circle center both blocks the link and respects the exclusion
    rng = np.random.default_rng(2)
    r_link = 5.0
    for rw in (0.02, 0.10):
        params = params_with(rw)
        excl = D + rw
        lo = np.array([-1.0, -1.0])
        hi = np.array([r_link + 1.0, 1.0])
        n = 6_000_000
        pts = rng.uniform(lo, hi, size=(n, 2))
        t = np.clip(pts[:, 0], 0.0, r_link)
        dist2 = (pts[:, 0] - t) ** 2 + pts[:, 1] ** 2
        hit = dist2 < (D / 2) ** 2
        outside = np.einsum("ij,ij->i", pts, pts) > excl * excl
        area = np.prod(hi - lo) * np.mean(hit & outside)
        want = r_link * D - params.overlap_area
        assert abs(area - want) < 5e-3


def test_overlap_identity_forward_band():
    # A + pi D^2/8 equals the forward half of the band |y| < D/2 cut
    # from the exclusion disk, the overlap shape behind r' * D - A
    for rw in (0.02, 0.10):
        params = params_with(rw)
        excl = D + rw
        q = D / 2.0
        half_band = q * np.sqrt(excl ** 2 - q ** 2) + \
            excl ** 2 * np.arcsin(q / excl)
        assert_allclose(params.overlap_area + np.pi * D * D / 8.0,
                        half_band, rtol=1e-12)


def test_p_direct_blocked_self_only():
    for rw, want in ((0.0, 0.75), (0.10, 1 - (1 - p_self_body(0.10, D)) ** 2)):
        got = p_direct_blocked(3.0, params_with(rw), k_people=1)
        assert_allclose(got, want, rtol=1e-12)


def test_p_direct_blocked_k1_independent_of_distance():
    p = params_with(0.10)
    vals = [p_direct_blocked(r, p, 1) for r in (0.6, 2.0, 9.0)]
    assert_allclose(vals, vals[0])


@settings(max_examples=200, deadline=None)
@given(st.floats(0.6, 15.0), st.floats(0.6, 15.0), st.integers(1, 60))
def test_p_direct_monotone(r1, r2, k):
    p = PARAMS
    lo, hi = sorted((r1, r2))
    assert p_direct_blocked(lo, p, k) <= p_direct_blocked(hi, p, k) + 1e-12
    assert (p_direct_blocked(r1, p, k)
            <= p_direct_blocked(r1, p, k + 1) + 1e-12)
    assert 0.0 <= p_direct_blocked(r1, p, k) <= 1.0


def test_p_self_body_monotone_in_standoff():
    vals = [p_self_body(rw, D) for rw in (0.0, 0.05, 0.10, 0.50)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_other_body_clamped_and_counted():
    stats = ClampStats()
    p = p_other_body(1e6, PARAMS, stats)
    assert p == 1.0
    assert stats.other_body == 1


def test_ceiling_endcap_branches():
    rw = 0.10
    params = params_with(rw)
    knee = np.sqrt(rw * (D + rw))
    full = np.arcsin(D / (2 * rw + D)) / np.pi
    assert _endcap_self_prob(knee + 1e-9, params) == pytest.approx(full)
    assert _endcap_self_prob(rw - 1e-9, params) == 0.0
    # continuity at both branch boundaries
    assert_allclose(_endcap_self_prob(knee - 1e-9, params),
                    _endcap_self_prob(knee + 1e-9, params), atol=1e-6)
    assert_allclose(_endcap_self_prob(rw + 1e-9, params), 0.0, atol=1e-4)
    # frozen middle-branch value, cross-checked by the MC probe below
    assert_allclose(_endcap_self_prob(0.12, params), 0.15367, atol=2e-5)


def test_ceiling_endcap_matches_rotating_circle_mc():
    rng = np.random.default_rng(3)
    for rw in (0.02, 0.10):
        params = params_with(rw)
        ring = D / 2 + rw
        for cap in (0.05, 0.12, 0.30, 1.0):
            ang = rng.uniform(0, 2 * np.pi, 1_000_000)
            center = ring * np.column_stack([np.cos(ang), np.sin(ang)])
            t = np.clip(center[:, 0], 0.0, cap)
            dist2 = (center[:, 0] - t) ** 2 + center[:, 1] ** 2
            mc = np.mean(dist2 < (D / 2) ** 2)
            want = _endcap_self_prob(cap, params)
            assert abs(mc - want) < 3.5 * np.sqrt(max(want, 1e-4) / ang.size) + 1e-4


def test_ceiling_components_zero_other_when_alone():
    p1, p2, p3 = p_ceiling_components(0.3, 0.4, PARAMS, k_people=1)
    assert p3 == 0.0
    assert 0.0 < p1 < 1.0 and 0.0 < p2 < 1.0


def test_ceiling_pair_area_matches_numeric_integration():
    # receiver-side stadium less the exclusion overlap plus the full
    # transmitter-side stadium, for capsules clear of each other
    rng = np.random.default_rng(12)
    a, b, r_link = 0.9, 1.1, 6.0
    params = PARAMS
    excl = D + params.standoff
    q = D / 2.0
    lo = np.array([-1.0, -1.0])
    hi = np.array([r_link + 1.0, 1.0])
    n = 6_000_000
    pts = rng.uniform(lo, hi, size=(n, 2))
    t_a = np.clip(pts[:, 0], 0.0, a)
    in_a = (pts[:, 0] - t_a) ** 2 + pts[:, 1] ** 2 < q * q
    t_b = np.clip(pts[:, 0], r_link - b, r_link)
    in_b = (pts[:, 0] - t_b) ** 2 + pts[:, 1] ** 2 < q * q
    outside = np.einsum("ij,ij->i", pts, pts) > excl * excl
    area = np.prod(hi - lo) * np.mean((in_a | in_b) & outside)
    assert abs(area - _ceiling_pair_area(a, b, params)) < 5e-3


def test_aux_marginal_reconstruction_identity():
    # survival products of the coupled factors must reproduce the
    # plain per-body survival for every branch of the piecewise forms
    rw = 0.10
    params = params_with(rw)
    p_sb = p_self_body(rw, D)
    for cap in (0.05, 0.11, 0.13, 0.2, 0.5, 2.0):
        cond = _endcap_conditional_prob(cap, params)
        ceil = _endcap_self_prob(cap, params)
        assert_allclose((1 - cond) * (1 - ceil), 1 - p_sb, rtol=1e-12)


def test_aux_other_reconstruction():
    k = 12
    a, b, r = 0.6, 0.9, 7.0
    c1, c2, c3 = p_ceiling_components(a, b, PARAMS, k)
    t1, t2, t3 = aux_conditional_probs(a, b, r, PARAMS, k)
    lhs = (1 - t3) * (1 - c3)
    rhs = (1 - p_other_body(r, PARAMS)) ** (k - 1)
    assert_allclose(lhs, rhs, rtol=1e-12)


def test_aux_first_branch_zero():
    rw = 0.10
    params = params_with(rw)
    knee = np.sqrt(rw * (D + rw))
    assert _endcap_conditional_prob(knee + 0.01, params) == 0.0


def test_sampler_ceiling_implies_direct_and_total_law():
    rng = np.random.default_rng(4)
    k = 10
    n = 1_000_000
    a = np.full(n, 0.8)
    b = np.full(n, 1.2)
    r = np.full(n, 6.0)
    direct, ceiling = sample_direct_and_ceiling(a, b, r, PARAMS, k, rng)
    assert np.all(direct[ceiling == 0.0] == 0.0)
    p5 = p_ceiling_blocked(0.8, 1.2, PARAMS, k)
    t1, t2, t3 = aux_conditional_probs(0.8, 1.2, 6.0, PARAMS, k)
    p_aux = 1 - (1 - t1) * (1 - t2) * (1 - t3)
    want = p5 + p_aux * (1 - p5)
    got = np.mean(direct == 0.0)
    assert abs(got - want) < 3.0 * np.sqrt(want * (1 - want) / n)
    # and the marginal matches the uncoupled direct-path formula
    marginal = p_direct_blocked(6.0, PARAMS, k)
    assert abs(got - marginal) < 3.0 * np.sqrt(marginal * (1 - marginal) / n)
    got5 = np.mean(ceiling == 0.0)
    assert abs(got5 - p5) < 3.0 * np.sqrt(p5 * (1 - p5) / n)


def test_signal_wall_self_only_at_k0():
    p = p_signal_wall_blocked(8.0, 0.2, PARAMS, k_people=0)
    ring = 2 * 0.10 + D
    want = (np.arcsin(0.2 / ring) + np.arcsin(D / ring)) / np.pi
    assert_allclose(p, want, rtol=1e-12)


def test_signal_wall_self_term_vanishes_for_large_standoff():
    # both arcsin arguments shrink with the standoff; use a footprint
    # large enough to keep the exclusion disk geometry valid
    vals = []
    for rw in (0.1, 1.0, 10.0, 100.0):
        params = BlockageParams(diameter=D, standoff=rw, footprint=1e8)
        vals.append(p_signal_wall_blocked(8.0, 0.2, params, 0))
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_signal_wall_arcsin_clamp_counted():
    stats = ClampStats()
    p = p_signal_wall_blocked(8.0, 10.0, PARAMS, 5, stats)
    assert stats.signal_arcsin == 1
    assert 0.0 <= p <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.6, 20.0),
       st.integers(0, 60))
def test_all_probabilities_in_unit_interval(a, b, r, k):
    assert 0.0 <= p_ceiling_blocked(a, b, PARAMS, max(k, 1)) <= 1.0
    assert 0.0 <= p_direct_blocked(r, PARAMS, max(k, 1)) <= 1.0
    assert 0.0 <= p_signal_wall_blocked(r, min(r, 0.25), PARAMS, k) <= 1.0
