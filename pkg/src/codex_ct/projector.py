"""2D parallel-beam forward projection and its exact adjoint.

Discretization: distance-driven pixel-onto-detector weighting.  At each
angle a pixel casts a rectangular footprint of width
(|cos| + |sin|) * pixel_pitch (the projected silhouette) centered on the
detector coordinate of its center; each detector bin receives the
overlap fraction, normalized so the footprint integrates to the pixel
area and projections approximate line integrals.  Backprojection
gathers with the identical weights, which makes the pair an exact
matrix transpose by construction.

The hot kernels are numba-compiled when numba is importable (parallel
over angles for projection and over pixels for backprojection; the
accumulation order per output element is a fixed sequential loop, so
results are bitwise reproducible for any thread count).  A pure-numpy
path covers environments without numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

    prange = range


def default_detector_count(n_side: int) -> int:
    """Detector bins covering the full image diagonal."""
    return int(math.ceil(math.sqrt(2.0) * n_side))


@dataclass(frozen=True)
class Geometry:
    """Square image grid plus a 1D detector, shared by all angles."""

    n_side: int
    pixel_pitch: float = 1.0
    num_detector: int | None = None
    detector_pitch: float | None = None
    center_offset: float = 0.0

    def __post_init__(self):
        if self.n_side < 1:
            raise ValueError("n_side must be >= 1")
        if self.num_detector is None:
            object.__setattr__(self, "num_detector", default_detector_count(self.n_side))
        if self.detector_pitch is None:
            object.__setattr__(self, "detector_pitch", self.pixel_pitch)
        if self.num_detector < 1:
            raise ValueError("num_detector must be >= 1")
        if self.pixel_pitch <= 0 or self.detector_pitch <= 0:
            raise ValueError("pitches must be positive")

    @property
    def n_pixels(self) -> int:
        return self.n_side * self.n_side


@dataclass
class Image:
    """Square attenuation map (per unit length) on a pixel grid."""

    values: np.ndarray
    geometry: Geometry

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = self.geometry.n_side
        if self.values.shape != (n, n):
            raise ValueError(f"image shape {self.values.shape} does not match geometry {n}x{n}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image contains non-finite entries")


@dataclass
class Sinogram:
    """Projection array over (angle index, detector pixel).

    role is 'micro' for the dense latent grid of N_theta micro-angles and
    'view' for acquired views.
    """

    values: np.ndarray
    angles_rad: np.ndarray
    role: str = "micro"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.angles_rad = np.atleast_1d(np.asarray(self.angles_rad, dtype=np.float64))
        if self.role not in ("micro", "view"):
            raise ValueError(f"unknown sinogram role {self.role!r}")
        if self.values.ndim != 2 or self.values.shape[0] != self.angles_rad.shape[0]:
            raise ValueError(
                f"sinogram shape {self.values.shape} inconsistent with {self.angles_rad.shape[0]} angles"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sinogram contains non-finite entries")

    @property
    def num_angles(self) -> int:
        return self.values.shape[0]

    @property
    def num_detector(self) -> int:
        return self.values.shape[1]


def _pixel_centers(geometry: Geometry):
    n, pitch = geometry.n_side, geometry.pixel_pitch
    c = (np.arange(n) - (n - 1) / 2.0) * pitch
    # x increases with column, y decreases with row (image row 0 on top)
    x = np.broadcast_to(c[None, :], (n, n)).ravel()
    y = np.broadcast_to(-c[:, None], (n, n)).ravel()
    return x, y


def _footprint_terms(geometry: Geometry, x, y, angle: float):
    """Yield (bin index, weight) pairs of the pixel footprints at one angle.

    Indices are pre-shifted by +1 into [0, num_detector + 1]; index 0
    and num_detector + 1 are off-detector sentinels whose weights are
    zeroed.  The same terms drive projection (scatter), backprojection
    (gather), and the A^T A diagonal, so the operator pair is a
    transpose by construction.
    """
    c, s = math.cos(angle), math.sin(angle)
    width_phys = (abs(c) + abs(s)) * geometry.pixel_pitch
    t = x * c + y * s - geometry.center_offset
    pos = t / geometry.detector_pitch + (geometry.num_detector - 1) / 2.0
    half = width_phys / geometry.detector_pitch / 2.0
    left = pos - half
    right = pos + half
    b0 = np.floor(left + 0.5).astype(np.int64)
    scale = geometry.pixel_pitch**2 / width_phys
    m_d = geometry.num_detector
    n_off = int(math.ceil(2.0 * half)) + 1
    for off in range(n_off):
        b = b0 + off
        overlap = np.minimum(right, b + 0.5) - np.maximum(left, b - 0.5)
        weight = scale * np.maximum(overlap, 0.0)
        weight *= (b >= 0) & (b < m_d)
        yield np.clip(b, -1, m_d) + 1, weight


@njit(cache=True, parallel=True)
def _project_kernel(flat, xs, ys, angles, m_d, pitch, det_pitch, center_offset, out):
    for a in prange(angles.size):
        c = math.cos(angles[a])
        s = math.sin(angles[a])
        width = (abs(c) + abs(s)) * pitch
        scale = pitch * pitch / width
        half = width / det_pitch / 2.0
        shift = (m_d - 1) / 2.0
        for j in range(xs.size):
            pos = (xs[j] * c + ys[j] * s - center_offset) / det_pitch + shift
            left = pos - half
            right = pos + half
            b = int(math.floor(left + 0.5))
            v = flat[j] * scale
            while b - 0.5 < right:
                if 0 <= b < m_d:
                    ov = min(right, b + 0.5) - max(left, b - 0.5)
                    if ov > 0.0:
                        out[a, b] += v * ov
                b += 1


@njit(cache=True, parallel=True)
def _backproject_kernel(sino, xs, ys, angles, m_d, pitch, det_pitch, center_offset, acc):
    n_ang = angles.size
    cs = np.empty(n_ang)
    sn = np.empty(n_ang)
    scales = np.empty(n_ang)
    halves = np.empty(n_ang)
    for a in range(n_ang):
        c = math.cos(angles[a])
        s = math.sin(angles[a])
        width = (abs(c) + abs(s)) * pitch
        cs[a] = c
        sn[a] = s
        scales[a] = pitch * pitch / width
        halves[a] = width / det_pitch / 2.0
    shift = (m_d - 1) / 2.0
    for j in prange(xs.size):
        total = 0.0
        for a in range(n_ang):
            pos = (xs[j] * cs[a] + ys[j] * sn[a] - center_offset) / det_pitch + shift
            left = pos - halves[a]
            right = pos + halves[a]
            b = int(math.floor(left + 0.5))
            while b - 0.5 < right:
                if 0 <= b < m_d:
                    ov = min(right, b + 0.5) - max(left, b - 0.5)
                    if ov > 0.0:
                        total += sino[a, b] * (scales[a] * ov)
                b += 1
        acc[j] = total


def project_values(image_values: np.ndarray, geometry: Geometry, angles) -> np.ndarray:
    """Forward projection of a 2D array; returns (num_angles, num_detector)."""
    x2d = np.asarray(image_values, dtype=np.float64)
    if x2d.shape != (geometry.n_side, geometry.n_side):
        raise ValueError(f"image shape {x2d.shape} does not match geometry")
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    if not np.all(np.isfinite(angles)):
        raise ValueError("angles must be finite")
    x, y = _pixel_centers(geometry)
    flat = np.ascontiguousarray(x2d.ravel())
    m_d = geometry.num_detector
    out = np.zeros((angles.size, m_d), dtype=np.float64)
    if _HAVE_NUMBA:
        _project_kernel(flat, x, y, angles, m_d, geometry.pixel_pitch,
                        geometry.detector_pitch, geometry.center_offset, out)
        return out
    for a, angle in enumerate(angles):
        row = np.zeros(m_d + 2, dtype=np.float64)
        for b, wgt in _footprint_terms(geometry, x, y, angle):
            row += np.bincount(b, weights=flat * wgt, minlength=m_d + 2)
        out[a] = row[1 : m_d + 1]
    return out


def backproject_values(sino_values: np.ndarray, geometry: Geometry, angles) -> np.ndarray:
    """Exact adjoint of project_values; returns an (n_side, n_side) array."""
    s = np.asarray(sino_values, dtype=np.float64)
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    if s.ndim != 2 or s.shape != (angles.size, geometry.num_detector):
        raise ValueError(
            f"sinogram shape {s.shape} does not match ({angles.size}, {geometry.num_detector})"
        )
    x, y = _pixel_centers(geometry)
    m_d = geometry.num_detector
    n = geometry.n_side
    if _HAVE_NUMBA:
        acc = np.zeros(geometry.n_pixels, dtype=np.float64)
        _backproject_kernel(np.ascontiguousarray(s), x, y, angles, m_d,
                            geometry.pixel_pitch, geometry.detector_pitch,
                            geometry.center_offset, acc)
        return acc.reshape(n, n)
    acc = np.zeros(geometry.n_pixels, dtype=np.float64)
    padded = np.zeros(m_d + 2, dtype=np.float64)
    for a, angle in enumerate(angles):
        padded[1 : m_d + 1] = s[a]
        for b, wgt in _footprint_terms(geometry, x, y, angle):
            acc += padded[b] * wgt
    n = geometry.n_side
    return acc.reshape(n, n)


def footprint_sums(geometry: Geometry, angles, bin_weights=None) -> np.ndarray:
    """Per-pixel sums over angles of squared footprint weights.

    Diagonal of A^T A (or A^T W A when per-bin weights are given); used
    as a preconditioner and for coordinate updates.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    x, y = _pixel_centers(geometry)
    m_d = geometry.num_detector
    if bin_weights is not None:
        bin_weights = np.asarray(bin_weights, dtype=np.float64)
        if bin_weights.shape != (angles.size, m_d):
            raise ValueError("bin_weights shape must match (num_angles, num_detector)")
    acc = np.zeros(geometry.n_pixels, dtype=np.float64)
    padded = np.zeros(m_d + 2, dtype=np.float64)
    for a, angle in enumerate(angles):
        if bin_weights is not None:
            padded[1 : m_d + 1] = bin_weights[a]
        for b, wgt in _footprint_terms(geometry, x, y, angle):
            if bin_weights is None:
                acc += wgt**2
            else:
                acc += padded[b] * wgt**2
    n = geometry.n_side
    return acc.reshape(n, n)


def pixel_footprints(geometry: Geometry, angles):
    """Footprint terms rearranged per pixel, for coordinate updates.

    Returns (bins, wgts), each shaped (n_pixels, num_angles, max_terms);
    bins use the padded convention of _footprint_terms (0 and
    num_detector + 1 are off-detector sentinels with zero weight).
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    x, y = _pixel_centers(geometry)
    per_angle = []
    for angle in angles:
        per_angle.append(list(_footprint_terms(geometry, x, y, angle)))
    max_terms = max(len(terms) for terms in per_angle)
    n_pix = geometry.n_pixels
    bins = np.zeros((angles.size, max_terms, n_pix), dtype=np.int64)
    wgts = np.zeros((angles.size, max_terms, n_pix), dtype=np.float64)
    for a, terms in enumerate(per_angle):
        for t, (b, w) in enumerate(terms):
            bins[a, t] = b
            wgts[a, t] = w
    return bins.transpose(2, 0, 1), wgts.transpose(2, 0, 1)


def project(image: Image, geometry: Geometry | None = None, angles=None, role: str = "micro") -> Sinogram:
    """Project an Image onto the detector at the given angles."""
    if geometry is None:
        geometry = image.geometry
    elif geometry != image.geometry:
        raise ValueError("geometry argument does not match the image's geometry")
    if angles is None:
        raise ValueError("angles are required")
    values = project_values(image.values, geometry, angles)
    return Sinogram(values=values, angles_rad=angles, role=role)


def backproject(sinogram: Sinogram, geometry: Geometry) -> Image:
    """Adjoint projection of a Sinogram back onto the pixel grid."""
    values = backproject_values(sinogram.values, geometry, sinogram.angles_rad)
    return Image(values=values, geometry=geometry)
