"""Reconstruction quality metrics: NRMSE and edge-based MTF curves.

The MTF pipeline follows the classical edge method: sample an edge
spread function along a line perpendicular to a known edge (bilinear
interpolation), differentiate it with central differences into a line
spread function, apply a Hamming window, and take the normalized FFT
magnitude.  Star and ring phantoms give tangential and radial curves at
analytically known edge positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import phantoms
from .projector import Image

MIN_PROFILE_SAMPLES = 16


def nrmse(x, x0) -> float:
    """||x - x0|| / ||x0||, the reconstruction error metric."""
    x = np.asarray(x, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    if x.shape != x0.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {x0.shape}")
    denom = float(np.linalg.norm(x0))
    if denom == 0.0:
        raise ValueError("reference image is identically zero")
    return float(np.linalg.norm(x - x0)) / denom


def rmse(x, x0) -> float:
    """Root-mean-square difference."""
    x = np.asarray(x, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    if x.shape != x0.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {x0.shape}")
    return float(np.sqrt(np.mean((x - x0) ** 2)))


@dataclass(frozen=True)
class EdgeProfileSpec:
    """Line profile crossing one edge, in centered pixel coordinates.

    The profile runs along the unit vector (ux, uy) through (cx, cy),
    sampling 2*half_samples + 1 points spaced `step` pixels apart.
    """

    cx: float
    cy: float
    ux: float
    uy: float
    half_samples: int
    step: float = 0.5

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.half_samples, self.half_samples + 1) * self.step


@dataclass
class MtfCurve:
    frequencies: np.ndarray  # cycles per pixel
    magnitudes: np.ndarray  # normalized, magnitudes[0] == 1
    direction: str  # tangential | radial
    radius: float  # pixels from the rotation center


def bilinear_sample(values: np.ndarray, xs, ys) -> np.ndarray:
    """Sample an image at centered coordinates (x right, y up)."""
    n_rows, n_cols = values.shape
    cols = np.asarray(xs, dtype=np.float64) + (n_cols - 1) / 2.0
    rows = (n_rows - 1) / 2.0 - np.asarray(ys, dtype=np.float64)
    c0 = np.clip(np.floor(cols).astype(np.int64), 0, n_cols - 2)
    r0 = np.clip(np.floor(rows).astype(np.int64), 0, n_rows - 2)
    fc = np.clip(cols - c0, 0.0, 1.0)
    fr = np.clip(rows - r0, 0.0, 1.0)
    v00 = values[r0, c0]
    v01 = values[r0, c0 + 1]
    v10 = values[r0 + 1, c0]
    v11 = values[r0 + 1, c0 + 1]
    return (v00 * (1 - fr) * (1 - fc) + v01 * (1 - fr) * fc
            + v10 * fr * (1 - fc) + v11 * fr * fc)


def extract_esf(values: np.ndarray, spec: EdgeProfileSpec) -> np.ndarray:
    offs = spec.offsets
    if offs.size < MIN_PROFILE_SAMPLES:
        raise ValueError(f"profile too short: {offs.size} < {MIN_PROFILE_SAMPLES} samples")
    xs = spec.cx + offs * spec.ux
    ys = spec.cy + offs * spec.uy
    return bilinear_sample(values, xs, ys)


def _derivative_response(freqs: np.ndarray, step: float) -> np.ndarray:
    """|transfer| of the central-difference derivative, sin(x)/x form."""
    arg = 2.0 * np.pi * freqs * step
    out = np.ones_like(arg)
    nz = arg != 0
    out[nz] = np.sin(arg[nz]) / arg[nz]
    # near-Nyquist values at coarse steps are unreliable; keep the
    # correction bounded instead of amplifying noise without limit
    return np.maximum(np.abs(out), 0.05)


def mtf_from_edge(image, spec: EdgeProfileSpec, direction: str = "tangential") -> MtfCurve:
    """ESF -> central-difference LSF -> Hamming window -> |FFT|, DC-normalized.

    The known response of the discrete derivative is divided out.
    """
    values = image.values if isinstance(image, Image) else np.asarray(image, dtype=np.float64)
    esf = extract_esf(values, spec)
    lsf = (esf[2:] - esf[:-2]) / (2.0 * spec.step)
    windowed = lsf * np.hamming(lsf.size)
    size = 1
    while size < 4 * windowed.size:
        size *= 2
    mag = np.abs(np.fft.rfft(windowed, size))
    freqs = np.fft.rfftfreq(size, d=spec.step)
    mag = mag / _derivative_response(freqs, spec.step)
    if mag[0] == 0.0:
        raise ValueError("profile has zero contrast; it does not cross an edge")
    keep = freqs <= 0.5 + 1e-12
    radius = math.hypot(spec.cx, spec.cy)
    return MtfCurve(frequencies=freqs[keep], magnitudes=mag[keep] / mag[0],
                    direction=direction, radius=radius)


def mtf_at(curve: MtfCurve, frequency: float) -> float:
    """Linear interpolation of the curve at one frequency."""
    return float(np.interp(frequency, curve.frequencies, curve.magnitudes))


def _average_curves(curves: list[MtfCurve]) -> MtfCurve:
    freqs = curves[0].frequencies
    mags = np.mean([c.magnitudes for c in curves], axis=0)
    return MtfCurve(frequencies=freqs, magnitudes=mags / mags[0],
                    direction=curves[0].direction, radius=curves[0].radius)


def star_profile_specs(n_side: int, radius: float, spokes: int,
                       step: float | None = None) -> list[EdgeProfileSpec]:
    """Tangential profiles crossing single wedge edges at a given radius."""
    gap = math.pi * radius / spokes  # tangential distance between edges
    if step is None:
        step = min(0.5, gap / 48.0)
    half = int(min(0.4 * gap, 8.0) / step)
    specs = []
    for az in phantoms.star_edge_azimuths(spokes):
        cx, cy = radius * math.cos(az), radius * math.sin(az)
        if max(abs(cx), abs(cy)) > n_side / 2.0 - 2:
            continue
        specs.append(EdgeProfileSpec(cx=cx, cy=cy, ux=-math.sin(az), uy=math.cos(az),
                                     half_samples=half, step=step))
    return specs


def circle_profile_specs(n_side: int, radius: float, n_azimuths: int = 8,
                         step: float | None = None) -> list[EdgeProfileSpec]:
    """Radial profiles crossing the ring edge nearest the requested radius."""
    edges = phantoms.circle_edge_radii(n_side)
    edge_r = float(edges[np.argmin(np.abs(edges - radius))])
    width = phantoms.ring_width(n_side)
    if step is None:
        step = min(0.25, width / 48.0)
    half = int(min(0.4 * width, 8.0) / step)
    specs = []
    for az in np.linspace(0, 2 * math.pi, n_azimuths, endpoint=False):
        cx, cy = edge_r * math.cos(az), edge_r * math.sin(az)
        specs.append(EdgeProfileSpec(cx=cx, cy=cy, ux=math.cos(az), uy=math.sin(az),
                                     half_samples=half, step=step))
    return specs


def mtf_report(reconstruction, phantom_kind: str, n_side: int | None = None,
               spokes: int = 16, radii=(0.25, 0.75)) -> list[MtfCurve]:
    """Direction-resolved MTF curves at near and far radii.

    phantom_kind 'siemens_star' measures tangentially across the wedge
    edges; 'concentric_circles' measures radially across ring edges.
    radii are fractions of the phantom support radius; each returned
    curve averages the magnitude over all usable edges at that radius.
    """
    values = (reconstruction.values if isinstance(reconstruction, Image)
              else np.asarray(reconstruction, dtype=np.float64))
    if n_side is None:
        n_side = values.shape[0]
    support = phantoms.phantom_support_radius(n_side)
    out = []
    for frac in radii:
        r = frac * support
        if phantom_kind == "siemens_star":
            specs = star_profile_specs(n_side, r, spokes)
            direction = "tangential"
        elif phantom_kind == "concentric_circles":
            specs = circle_profile_specs(n_side, r)
            direction = "radial"
        else:
            raise ValueError(f"no edge geometry for phantom kind {phantom_kind!r}")
        curves = [mtf_from_edge(values, s, direction) for s in specs]
        avg = _average_curves(curves)
        out.append(MtfCurve(frequencies=avg.frequencies, magnitudes=avg.magnitudes,
                            direction=direction, radius=r))
    return out


def curve_to_rows(curve: MtfCurve):
    """Rows (frequency, magnitude, direction, radius) for CSV export."""
    return [
        (float(f), float(m), curve.direction, float(curve.radius))
        for f, m in zip(curve.frequencies, curve.magnitudes)
    ]
