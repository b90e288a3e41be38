"""Synthetic test phantoms with analytically known edge geometry.

All phantoms are deterministic for a fixed seed, take values in [0, 1],
and are anti-aliased by 4x4 subpixel averaging so that projections of
radially symmetric objects are close to angle-invariant.
"""

from __future__ import annotations

import numpy as np

from .projector import Geometry, Image

_OVERSAMPLE = 4

DISK_RADIUS_FRACTION = 0.35
SUPPORT_RADIUS_FRACTION = 0.45
RING_COUNT = 8


def phantom_support_radius(n_side: int) -> float:
    """Outer radius (in pixels) of the star / circles / blobs phantoms."""
    return SUPPORT_RADIUS_FRACTION * n_side


def _subpixel_grid(n_side: int):
    """Pixel-center coordinates of the oversampled grid, in pixel units."""
    step = 1.0 / _OVERSAMPLE
    c = (np.arange(n_side * _OVERSAMPLE) + 0.5) * step - n_side / 2.0
    x = c[None, :]
    y = -c[:, None]
    return x, y


def _downsample(fine: np.ndarray) -> np.ndarray:
    n = fine.shape[0] // _OVERSAMPLE
    return fine.reshape(n, _OVERSAMPLE, n, _OVERSAMPLE).mean(axis=(1, 3))


def make_phantom(kind: str, n_side: int, seed: int = 0, spokes: int = 16,
                 geometry: Geometry | None = None) -> Image:
    """Build a named phantom on an n_side x n_side grid.

    Kinds: 'disk' (uniform disk), 'blobs' (random smooth bumps),
    'siemens_star' (alternating wedges, `spokes` bright sectors), and
    'concentric_circles' (alternating rings).
    """
    if n_side < 16:
        raise ValueError("n_side must be >= 16")
    if geometry is None:
        geometry = Geometry(n_side=n_side)
    x, y = _subpixel_grid(n_side)
    r = np.hypot(x, y)
    if kind == "disk":
        fine = (r <= DISK_RADIUS_FRACTION * n_side).astype(np.float64)
    elif kind == "blobs":
        fine = _blobs(n_side, seed, x, y, r)
    elif kind == "siemens_star":
        if spokes < 2:
            raise ValueError("siemens_star needs at least 2 spokes")
        phi = np.arctan2(y, x)
        wedges = (np.sin(spokes * phi) > 0).astype(np.float64)
        fine = wedges * (r <= phantom_support_radius(n_side))
    elif kind == "concentric_circles":
        ring = np.floor(r / ring_width(n_side)).astype(np.int64)
        fine = ((ring % 2) == 0).astype(np.float64)
        fine *= r <= phantom_support_radius(n_side)
    else:
        raise ValueError(f"unknown phantom kind {kind!r}")
    return Image(values=_downsample(fine), geometry=geometry)


def _blobs(n_side, seed, x, y, r):
    """Sharp-edged random ellipse inclusions over a soft background.

    Piecewise-constant structure stresses angular aliasing the way real
    scanned objects do; a purely smooth phantom would flatter linear
    interpolation baselines.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    support = phantom_support_radius(n_side)
    n_ellipses = 10
    centers = rng.uniform(-0.55 * support, 0.55 * support, size=(n_ellipses, 2))
    semi_a = rng.uniform(0.05, 0.2, size=n_ellipses) * n_side
    semi_b = rng.uniform(0.05, 0.2, size=n_ellipses) * n_side
    tilt = rng.uniform(0.0, np.pi, size=n_ellipses)
    amps = rng.uniform(0.15, 0.45, size=n_ellipses)
    signs = rng.choice([-1.0, 1.0], size=n_ellipses, p=[0.4, 0.6])
    fine = np.full(r.shape, 0.3)
    for (cx, cy), sa, sb, th, a, s in zip(centers, semi_a, semi_b, tilt, amps, signs):
        u = (x - cx) * np.cos(th) + (y - cy) * np.sin(th)
        v = -(x - cx) * np.sin(th) + (y - cy) * np.cos(th)
        fine += (s * a) * ((u / sa) ** 2 + (v / sb) ** 2 <= 1.0)
    fine = np.clip(fine, 0.0, 1.0)
    # smooth roll-off at the support edge keeps projections inside the detector
    roll = np.clip((support - r) / (0.05 * n_side), 0.0, 1.0)
    return fine * roll


def ring_width(n_side: int) -> float:
    """Radial width (pixels) of one ring of the concentric-circles phantom."""
    return phantom_support_radius(n_side) / RING_COUNT


def star_edge_azimuths(spokes: int) -> np.ndarray:
    """Azimuths of the wedge boundaries of the star phantom, in [0, 2*pi)."""
    return np.arange(2 * spokes) * np.pi / spokes


def circle_edge_radii(n_side: int) -> np.ndarray:
    """Radii (pixels) of the ring boundaries of the circles phantom."""
    w = ring_width(n_side)
    return np.arange(1, RING_COUNT) * w
