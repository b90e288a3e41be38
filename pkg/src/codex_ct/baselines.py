"""Baseline reconstructors: linear view deblurring and filtered backprojection.

The linear deblur solves, per detector pixel, the ridge-stabilized
least-squares problem argmin_p 1/2 ||y - C p||^2 + ridge/2 ||p||^2 by
conjugate gradient on the normal equations.  Starting from zero keeps
the iterates in the row space of C, so the tiny default ridge yields
the minimum-norm solution of the underdetermined sparse-view case.
FBP uses the classical sampled ramp kernel, an optional Hamming window,
and the projector's own interpolating backprojection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acquisition import apply_C, apply_C_transpose
from .projector import Geometry, Image, Sinogram, backproject_values
from .sampling import ExposureCode, SamplingPlan


@dataclass
class FbpConfig:
    filter: str = "ramp"  # ramp | hamming
    interpolation: str = "linear"

    def __post_init__(self):
        if self.filter not in ("ramp", "hamming"):
            raise ValueError(f"unknown filter {self.filter!r}")
        if self.interpolation != "linear":
            raise ValueError("only linear interpolation is implemented")


@dataclass
class DeblurLinearResult:
    p: np.ndarray
    residual_norms: list[float] = field(default_factory=list)


def deblur_linear(y, plan: SamplingPlan, code: ExposureCode,
                  iterations: int = 200, ridge: float = 1e-6) -> DeblurLinearResult:
    """Least-squares interpolation of views back onto the micro grid.

    Runs a fixed budget of CG iterations on (C^T C + ridge I) p = C^T y
    for every detector pixel at once and records ||y - C p|| per
    iteration.
    """
    y = y.values if isinstance(y, Sinogram) else np.asarray(y, dtype=np.float64)
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")

    def normal_op(p):
        return apply_C_transpose(plan, code, apply_C(plan, code, p)) + ridge * p

    b = apply_C_transpose(plan, code, y)
    p = np.zeros_like(b)
    r = b.copy()
    d = r.copy()
    rs = float(np.sum(r * r))
    result = DeblurLinearResult(p=p)
    result.residual_norms.append(float(np.linalg.norm(y - apply_C(plan, code, p))))
    for _ in range(iterations):
        if rs <= 1e-300:
            result.residual_norms.append(result.residual_norms[-1])
            continue
        ad = normal_op(d)
        denom = float(np.sum(d * ad))
        if denom <= 0:
            break
        alpha = rs / denom
        p = p + alpha * d
        r = r - alpha * ad
        rs_new = float(np.sum(r * r))
        d = r + (rs_new / rs) * d
        rs = rs_new
        result.residual_norms.append(float(np.linalg.norm(y - apply_C(plan, code, p))))
    result.p = p
    return result


def ramp_kernel(size: int, pitch: float) -> np.ndarray:
    """Sampled spatial ramp-filter kernel on [-(size-1), size-1] bins."""
    n = np.arange(-(size - 1), size)
    h = np.zeros(n.size)
    h[n == 0] = 1.0 / (4.0 * pitch**2)
    odd = n % 2 == 1
    h[odd] = -1.0 / (np.pi * n[odd] * pitch) ** 2
    return h


def filter_sinogram(values: np.ndarray, pitch: float, config: FbpConfig | None = None) -> np.ndarray:
    """Ramp-filter every row of a sinogram (zero-padded FFT convolution)."""
    if config is None:
        config = FbpConfig()
    n_det = values.shape[1]
    kernel = ramp_kernel(n_det, pitch)
    size = 1
    while size < values.shape[1] + kernel.size - 1:
        size *= 2
    kf = np.fft.rfft(kernel, size)
    if config.filter == "hamming":
        freqs = np.fft.rfftfreq(size)
        window = 0.54 + 0.46 * np.cos(2.0 * np.pi * freqs)  # freqs span [0, 0.5]
        kf = kf * window
    vf = np.fft.rfft(values, size, axis=1)
    full = np.fft.irfft(vf * kf[None, :], size, axis=1)
    # 'same' part of the linear convolution, scaled to a Riemann sum
    return pitch * full[:, n_det - 1 : 2 * n_det - 1]


def fbp(p_micro, angles, geometry: Geometry, config: FbpConfig | None = None) -> Image:
    """Filtered backprojection of a (dense) sinogram.

    Scaled by pi / num_angles; backprojection shares the projector's
    footprint weights, normalized back to plain interpolation.
    """
    values = p_micro.values if isinstance(p_micro, Sinogram) else np.asarray(p_micro, dtype=np.float64)
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    filtered = filter_sinogram(values, geometry.detector_pitch, config)
    back = backproject_values(filtered, geometry, angles)
    # undo the line-integral footprint scale to get pure interpolation
    scale = np.pi / angles.size * geometry.detector_pitch / geometry.pixel_pitch**2
    return Image(values=scale * back, geometry=geometry)


def ifbp(y, plan: SamplingPlan, code: ExposureCode, geometry: Geometry,
         fbp_config: FbpConfig | None = None, cg_iterations: int = 200,
         ridge: float = 1e-6) -> Image:
    """Linear deblur of the coded views followed by FBP on the micro grid."""
    deblurred = deblur_linear(y, plan, code, iterations=cg_iterations, ridge=ridge)
    return fbp(deblurred.p, plan.micro_angles_rad, geometry, fbp_config)
