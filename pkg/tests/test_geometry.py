"""Mirror images, incidence angles, projections."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from wearsim.geometry import (Enclosure, image_points, incidence_angles,
                              link_lengths, mirror_xy, planar_distance,
                              project_xy, ray_orientation,
                              receiver_ceiling_image)

ENC = Enclosure(20.0, 4.0, 2.5)


def reflect_across_plane(p, axis, plane_coord):
    """Independent oracle: mirror a point across an axis-aligned plane."""
    p = np.array(p, dtype=float)
    p[axis] = 2.0 * plane_coord - p[axis]
    return p


def incidence_oracle(tx, rx, axis, plane_coord, enc):
    """Angle between the incident ray and the surface normal.

    Traces the receiver-to-image segment to its plane crossing, then
    measures the real incident ray (wall point minus transmitter)
    against the normal.
    """
    tx = np.array(tx, dtype=float)
    rx = np.array(rx, dtype=float)
    image = reflect_across_plane(tx, axis, plane_coord)
    t = (plane_coord - rx[axis]) / (image[axis] - rx[axis])
    bounce = rx + t * (image - rx)
    ray = bounce - tx
    normal = np.zeros(3)
    normal[axis] = 1.0
    return np.arccos(abs(ray @ normal) / np.linalg.norm(ray))


WALL_PLANES = [(0, 10.0), (0, -10.0), (1, 2.0), (1, -2.0), (2, 1.25),
               (2, -1.25)]


def test_image_points_center():
    imgs = image_points(np.zeros(3), ENC)
    assert_allclose(imgs[0], [20.0, 0.0, 0.0])
    assert_allclose(imgs[1], [-20.0, 0.0, 0.0])
    assert_allclose(imgs[4], [0.0, 0.0, 2.5])
    assert_allclose(imgs[5], [0.0, 0.0, -2.5])


def test_image_points_offset_wall3():
    imgs = image_points(np.array([8.5, 1.5, 0.25]), ENC)
    expected = reflect_across_plane([8.5, 1.5, 0.25], 1, 2.0)
    assert_allclose(imgs[2], expected)
    assert_allclose(imgs[2], [8.5, 2.5, 0.25])


def test_image_rejects_outside_point():
    with pytest.raises(ValueError):
        image_points(np.array([10.5, 0.0, 0.0]), ENC)


inside_points = st.tuples(
    st.floats(-9.99, 9.99), st.floats(-1.99, 1.99), st.floats(-1.24, 1.24))


@settings(max_examples=200, deadline=None)
@given(inside_points)
def test_mirror_involution(p):
    p = np.array(p)
    imgs = image_points(p, ENC)
    for i, (axis, plane) in enumerate(WALL_PLANES):
        back = reflect_across_plane(imgs[i], axis, plane)
        assert_allclose(back, p, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(inside_points, inside_points)
def test_image_path_never_shorter(p, q):
    tx, rx = np.array(p), np.array(q)
    if np.linalg.norm(tx - rx) < 1e-6:
        return
    r, r_img = link_lengths(tx, rx, enc=ENC)
    assert np.all(r_img >= r - 1e-12)


@settings(max_examples=200, deadline=None)
@given(inside_points, inside_points)
def test_incidence_angles_match_ray_trace(p, q):
    tx, rx = np.array(p), np.array(q)
    if np.linalg.norm(tx - rx) < 1e-6:
        return
    theta = incidence_angles(tx, rx, ENC)
    for i, (axis, plane) in enumerate(WALL_PLANES):
        assert_allclose(theta[i], incidence_oracle(tx, rx, axis, plane, ENC),
                        atol=1e-9)


def test_incidence_vertical_alignment():
    # transmitter directly below the receiver: the ceiling bounce is
    # at normal incidence
    theta = incidence_angles(np.array([0.0, 0.0, -0.5]), np.zeros(3), ENC)
    assert_allclose(theta[4], 0.0, atol=1e-12)
    r, r_img = link_lengths(np.array([0.0, 0.0, -0.5]), np.zeros(3), enc=ENC)
    assert_allclose(r_img[4], 3.0)


def test_incidence_wall3_example():
    # oracle value for this configuration: arccos(4 / sqrt(20))
    tx = np.array([1.0, 0.0, 0.0])
    rx = np.array([-1.0, 0.0, 0.0])
    theta = incidence_angles(tx, rx, ENC)
    expected = incidence_oracle(tx, rx, 1, 2.0, ENC)
    assert_allclose(expected, np.arccos(4.0 / np.sqrt(20.0)), atol=1e-12)
    assert_allclose(theta[2], expected, atol=1e-9)


def test_incidence_rejects_coincident():
    with pytest.raises(ValueError):
        incidence_angles(np.zeros(3), np.zeros(3), ENC)


def test_receiver_ceiling_image():
    assert_allclose(receiver_ceiling_image(np.zeros(3), ENC), [0, 0, 2.5])
    assert_allclose(receiver_ceiling_image(np.array([8.5, 1.5, 0.25]), ENC),
                    [8.5, 1.5, 2.25])


def test_ceiling_image_involution():
    rx = np.array([3.0, -1.0, 0.2])
    img = receiver_ceiling_image(rx, ENC)
    back = reflect_across_plane(img, 2, 1.25)
    assert_allclose(back, rx, atol=1e-12)


def test_projection_345():
    p = np.array([3.0, 4.0, 1.0])
    assert_allclose(project_xy(p), [3.0, 4.0])
    assert_allclose(planar_distance(p, np.zeros(3)), 5.0)


@settings(max_examples=100, deadline=None)
@given(inside_points, inside_points)
def test_projection_idempotent_and_contractive(p, q):
    p3, q3 = np.array(p), np.array(q)
    assert_allclose(project_xy(project_xy(p3)), project_xy(p3))
    assert planar_distance(p3, q3) <= np.linalg.norm(p3 - q3) + 1e-12


def test_mirror_xy_matches_3d_images():
    pts = np.array([[1.0, 0.5], [-3.0, 1.5]])
    for wall in range(4):
        full = image_points(np.column_stack([pts, np.zeros(2)]), ENC)
        assert_allclose(mirror_xy(pts, ENC, wall), full[:, wall, :2])


def test_ray_orientation_examples():
    el, az = ray_orientation(np.array([0.0, 0.0, 1.0]), np.zeros(3))
    assert_allclose(el, 0.0, atol=1e-12)
    el, az = ray_orientation(np.array([1.0, 0.0, 0.0]), np.zeros(3))
    assert_allclose([el, az], [np.pi / 2, 0.0], atol=1e-12)
    el, az = ray_orientation(np.array([1.0, 1.0, 1.0]), np.zeros(3))
    assert_allclose(el, np.arccos(1.0 / np.sqrt(3.0)), atol=1e-12)
    assert_allclose(az, np.pi / 4, atol=1e-12)


def test_ray_orientation_rejects_zero_ray():
    with pytest.raises(ValueError):
        ray_orientation(np.zeros(3), np.zeros(3))


def test_enclosure_validation():
    with pytest.raises(ValueError):
        Enclosure(0.0, 4.0, 2.5)
