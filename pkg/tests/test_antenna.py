"""Two-level antenna pattern, gains, and the stochastic gain model."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate

from wearsim.antenna import (AntennaPattern, gain, mainlobe_hit_probability,
                             off_axis_cos, phantom_beam, receive_off_axis,
                             sample_tx_gain, transmit_off_axis, upa_pattern)


def to_db(x):
    return 10.0 * np.log10(x)


def sph_unit(az, el):
    return np.array([np.sin(el) * np.cos(az), np.sin(el) * np.sin(az),
                     np.cos(el)])


@pytest.mark.parametrize("n,g_db,side_db,width_deg", [
    (1, 0.0, 0.0, None),
    (4, 6.02, -0.68, 49.6),
    (9, 9.54, -0.80, 33.0),
    (16, 12.04, -0.85, 24.6),
])
def test_array_settings_table(n, g_db, side_db, width_deg):
    p = upa_pattern(n)
    assert p.main_gain == n
    assert_allclose(p.beamwidth, np.sqrt(3.0 / n), rtol=1e-12)
    assert_allclose(to_db(p.main_gain), g_db, atol=0.005)
    assert_allclose(to_db(p.side_gain), side_db, atol=0.005)
    if width_deg is not None:
        # the published table rounds the widths; the formula value for
        # N=16 is 24.8 degrees
        assert_allclose(np.degrees(p.beamwidth), width_deg, atol=0.25)


def test_isotropic_degenerate():
    p = upa_pattern(1)
    assert p.is_isotropic
    assert_allclose(gain(p, np.linspace(0, np.pi, 11)), 1.0)


def test_rejects_bad_element_count():
    with pytest.raises(ValueError):
        upa_pattern(0)
    with pytest.raises(ValueError):
        mainlobe_hit_probability(0)


@pytest.mark.parametrize("n", [1, 4, 9, 16, 25, 64, 144, 1024])
def test_power_normalization_identity(n):
    p = upa_pattern(n)
    half = p.beamwidth / 2.0
    total = (p.main_gain * (1 - np.cos(half)) / 2
             + p.side_gain * (1 + np.cos(half)) / 2)
    assert_allclose(total, 1.0, atol=1e-12)


def test_power_normalization_by_quadrature():
    p = upa_pattern(9)
    val, _ = integrate.quad(
        lambda t: gain(p, t) * np.sin(t) / 2.0, 0.0, np.pi, limit=200,
        points=[p.beamwidth / 2.0])
    assert_allclose(val, 1.0, atol=1e-9)


def test_gain_step_boundary_belongs_to_main_lobe():
    p = upa_pattern(9)
    half = p.beamwidth / 2.0
    assert gain(p, 0.0) == p.main_gain
    assert gain(p, half) == p.main_gain
    assert gain(p, np.nextafter(half, np.pi)) == p.side_gain
    assert gain(p, np.pi) == p.side_gain


def test_gain_two_level():
    p = upa_pattern(16)
    vals = np.unique(gain(p, np.linspace(0, np.pi, 999)))
    assert vals.size == 2


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0, np.pi),
       st.floats(0, 2 * np.pi), st.floats(0, np.pi))
def test_off_axis_angle_matches_dot_product(baz, bel, raz, rel):
    # compare through the cosine as well: arccos amplifies rounding
    # without bound when the two directions (anti)coincide
    dot = sph_unit(baz, bel) @ sph_unit(raz, rel)
    got = receive_off_axis(baz, bel, raz, rel)
    assert_allclose(np.cos(got), np.clip(dot, -1, 1), atol=1e-12)
    if 1.0 - abs(dot) > 1e-9:
        assert_allclose(got, np.arccos(np.clip(dot, -1, 1)), atol=1e-9)
    got_tx = transmit_off_axis(baz, bel, raz, rel)
    assert_allclose(np.cos(got_tx), np.clip(-dot, -1, 1), atol=1e-12)


def test_phantom_beam_directions():
    az, el = 0.7, 1.1
    assert_allclose(phantom_beam(az, el, 0), (np.pi - az, el))
    assert_allclose(phantom_beam(az, el, 2), (-az, el))
    assert_allclose(phantom_beam(az, el, 4), (az, np.pi - el))
    assert_allclose(phantom_beam(az, el, 5), (az, np.pi - el))


@pytest.mark.parametrize("surface", range(6))
def test_phantom_beam_involution(surface):
    az, el = 2.1, 0.6
    a1, e1 = phantom_beam(az, el, surface)
    a2, e2 = phantom_beam(a1, e1, surface)
    # azimuth wraps modulo 2*pi
    assert_allclose(np.cos(a2 - az), 1.0, atol=1e-12)
    assert_allclose(e2, el, atol=1e-12)


def test_phantom_beam_preserves_mirror_geometry():
    # the phantom beam must make the same angle with the mirrored ray
    # as the original beam makes with the original ray
    rng = np.random.default_rng(11)
    for _ in range(200):
        baz, bel = rng.uniform(0, 2 * np.pi), np.arccos(rng.uniform(-1, 1))
        raz, rel = rng.uniform(0, 2 * np.pi), np.arccos(rng.uniform(-1, 1))
        for surface, flip in ((0, "x"), (2, "y"), (4, "z")):
            paz, pel = phantom_beam(baz, bel, surface)
            ray = sph_unit(raz, rel)
            mirrored = ray.copy()
            mirrored["xyz".index(flip)] *= -1.0
            m_el = np.arccos(mirrored[2])
            m_az = np.arctan2(mirrored[1], mirrored[0])
            assert_allclose(off_axis_cos(paz, pel, m_az, m_el),
                            off_axis_cos(baz, bel, raz, rel), atol=1e-9)


def test_hit_probability_value_and_limit():
    assert_allclose(mainlobe_hit_probability(4), 0.046147140466695845,
                    rtol=1e-12)
    # large-N asymptote: p ~ 3 / (16 N)
    for n in (10_000, 40_000):
        assert_allclose(mainlobe_hit_probability(n) * 16 * n / 3.0, 1.0,
                        rtol=1e-3)
    ps = [mainlobe_hit_probability(n) for n in (1, 4, 9, 16, 64)]
    assert all(b < a for a, b in zip(ps, ps[1:]))


def test_hit_probability_matches_cap_sampling():
    n_el = 4
    p = upa_pattern(n_el)
    rng = np.random.default_rng(3)
    trials = 1_000_000
    el = np.arccos(1 - 2 * rng.uniform(0, 1, trials))
    hits = np.mean(el <= p.beamwidth / 2.0)
    want = mainlobe_hit_probability(n_el)
    assert abs(hits - want) < 3.0 * np.sqrt(want * (1 - want) / trials)


def test_sample_tx_gain_statistics():
    n_el = 16
    p = upa_pattern(n_el)
    p_hit = mainlobe_hit_probability(n_el)
    rng = np.random.default_rng(5)
    draws = sample_tx_gain(p, p_hit, rng, size=1_000_000)
    assert set(np.unique(draws)) == {p.main_gain, p.side_gain}
    expected = p_hit * p.main_gain + (1 - p_hit) * p.side_gain
    # the cap probability equals the main-lobe solid-angle fraction, so
    # the expectation lands on the normalization value
    assert_allclose(expected, 1.0, atol=1e-12)
    sd = np.sqrt(p_hit * (1 - p_hit)) * (p.main_gain - p.side_gain)
    assert abs(draws.mean() - expected) < 3.0 * sd / 1000.0


def test_sample_tx_gain_isotropic():
    p = upa_pattern(1)
    rng = np.random.default_rng(9)
    assert_allclose(sample_tx_gain(p, mainlobe_hit_probability(1), rng,
                                   size=100), 1.0)
