"""Tests for the synthetic phantoms."""

import numpy as np
import pytest

from codex_ct.phantoms import (
    circle_edge_radii,
    make_phantom,
    phantom_support_radius,
    ring_width,
    star_edge_azimuths,
)


@pytest.mark.parametrize("kind", ["disk", "blobs", "siemens_star", "concentric_circles"])
def test_values_in_unit_range(kind):
    img = make_phantom(kind, 64, seed=3)
    assert img.values.min() >= 0.0
    assert img.values.max() <= 1.0
    assert img.values.shape == (64, 64)


def test_blobs_deterministic():
    a = make_phantom("blobs", 48, seed=0)
    b = make_phantom("blobs", 48, seed=0)
    assert np.array_equal(a.values, b.values)
    c = make_phantom("blobs", 48, seed=1)
    assert not np.array_equal(a.values, c.values)


def test_small_grid_rejected():
    with pytest.raises(ValueError):
        make_phantom("disk", 8)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        make_phantom("cube", 32)


def test_star_spokes_validation():
    with pytest.raises(ValueError):
        make_phantom("siemens_star", 64, spokes=1)


def _alternations_on_circle(values, radius, n_samples=720):
    n = values.shape[0]
    phi = np.linspace(0, 2 * np.pi, n_samples, endpoint=False)
    cols = radius * np.cos(phi) + (n - 1) / 2.0
    rows = (n - 1) / 2.0 - radius * np.sin(phi)
    samp = values[np.round(rows).astype(int), np.round(cols).astype(int)]
    binary = samp > 0.5
    return np.count_nonzero(binary[1:] != binary[:-1])


def test_star_edge_density_grows_toward_center():
    img = make_phantom("siemens_star", 256, spokes=16)
    # the wedge pattern has a fixed number of transitions per revolution,
    # so cycles per pixel of arc length grow as the radius shrinks
    r_far = 0.75 * phantom_support_radius(256)
    r_near = 0.3 * phantom_support_radius(256)
    alt_far = _alternations_on_circle(img.values, r_far)
    alt_near = _alternations_on_circle(img.values, r_near)
    assert alt_far == alt_near == 32  # 2 * spokes edges per revolution
    density_far = alt_far / (2 * np.pi * r_far)
    density_near = alt_near / (2 * np.pi * r_near)
    assert density_near > 2.0 * density_far


def test_star_edges_match_advertised_azimuths():
    spokes = 8
    img = make_phantom("siemens_star", 128, spokes=spokes)
    az = star_edge_azimuths(spokes)
    assert len(az) == 2 * spokes
    n = 128
    r = 0.6 * phantom_support_radius(n)
    for a in az[:4]:
        inside = img.values[
            int(round((n - 1) / 2.0 - r * np.sin(a + 0.05))),
            int(round(r * np.cos(a + 0.05) + (n - 1) / 2.0)),
        ]
        outside = img.values[
            int(round((n - 1) / 2.0 - r * np.sin(a - 0.05))),
            int(round(r * np.cos(a - 0.05) + (n - 1) / 2.0)),
        ]
        assert abs(inside - outside) > 0.5  # crosses a wedge boundary


def test_circle_edges_alternate_rings():
    img = make_phantom("concentric_circles", 128)
    radii = circle_edge_radii(128)
    assert np.all(np.diff(radii) > 0)
    w = ring_width(128)
    n = 128
    center = (n - 1) / 2.0
    for edge in radii[2:5]:
        inner = img.values[int(round(center)), int(round(center + edge - w / 2))]
        outer = img.values[int(round(center)), int(round(center + edge + w / 2))]
        assert abs(inner - outer) > 0.5


def test_disk_radially_symmetric():
    img = make_phantom("disk", 64)
    assert np.allclose(img.values, img.values[::-1, :])
    assert np.allclose(img.values, img.values[:, ::-1])
    assert np.allclose(img.values, img.values.T)
