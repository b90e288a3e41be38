"""Coded measurement model: operator C, photon counts, weights, binning.

The coded-sum operator C maps the N_theta micro-projection bins to the
M_theta view bins, one detector pixel at a time: view i averages the
open chops of the code over micro-angles (i*K + k) mod N_theta, divided
by the number of open chops, so every row of C sums to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .phantoms import make_phantom  # noqa: F401  (phantom factory lives with acquisition)
from .projector import Image, Sinogram, project_values
from .sampling import ExposureCode, SamplingPlan


class ConfigurationError(ValueError):
    """Inconsistent acquisition inputs (shape, flux, or code mismatch)."""


@dataclass
class PhotonCounts:
    """Detector counts for the M_theta acquired views.

    lambda0 is the source flux per chop.  With lambda0 = inf the values
    hold the exact expected counts for a unit reference flux (no noise).
    """

    values: np.ndarray
    lambda0: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(self.values < 0):
            raise ValueError("photon counts must be nonnegative")
        if not (self.lambda0 > 0):
            raise ConfigurationError("lambda0 must be positive (or inf for noiseless)")


@dataclass
class WeightMatrix:
    """Diagonal data weights w * exp(-y), stored per (view, detector) bin."""

    values: np.ndarray
    w: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.w <= 0:
            raise ValueError("weight scale w must be positive")


def _check_code(plan: SamplingPlan, code: ExposureCode):
    if code.length != plan.K:
        raise ConfigurationError(f"code length {code.length} does not match plan K={plan.K}")


def _coded_indices(plan: SamplingPlan, code: ExposureCode) -> np.ndarray:
    """Micro-bin index for every (view, open chop): (i*K + k) mod N_theta."""
    on = code.on_chops
    views = np.arange(plan.M_theta, dtype=np.int64)[:, None]
    return (views * plan.K + on[None, :]) % plan.N_theta


def apply_C(plan: SamplingPlan, code: ExposureCode, micro_values):
    """Row-stochastic coded sum of micro-bins into view bins.

    out[i, d] = sum over open chops k of micro[(i*K + k) mod N_theta, d] / cbar.
    Accepts a (N_theta, M_d) array or a micro Sinogram; returns the same kind.
    """
    _check_code(plan, code)
    values, wrap = _unwrap(micro_values, plan.N_theta, "micro")
    idx = _coded_indices(plan, code)
    out = values[idx].sum(axis=1) / code.cbar
    if wrap is None:
        return out
    return Sinogram(values=out, angles_rad=plan.nominal_view_angles_rad, role="view")


def apply_C_transpose(plan: SamplingPlan, code: ExposureCode, view_values):
    """Exact adjoint of apply_C: scatter each view back over its open chops."""
    _check_code(plan, code)
    values, wrap = _unwrap(view_values, plan.M_theta, "view")
    idx = _coded_indices(plan, code)
    out = np.zeros((plan.N_theta, values.shape[1]), dtype=np.float64)
    contrib = np.broadcast_to(values[:, None, :] / code.cbar,
                              (plan.M_theta, idx.shape[1], values.shape[1]))
    np.add.at(out, idx.ravel(), contrib.reshape(-1, values.shape[1]))
    if wrap is None:
        return out
    return Sinogram(values=out, angles_rad=_micro_angles(plan), role="micro")


def _micro_angles(plan: SamplingPlan) -> np.ndarray:
    return plan.micro_angles_rad


def _unwrap(values, expected_rows: int, what: str):
    if isinstance(values, Sinogram):
        arr = values.values
        wrap = values
    else:
        arr = np.asarray(values, dtype=np.float64)
        wrap = None
    if arr.ndim != 2 or arr.shape[0] != expected_rows:
        raise ConfigurationError(
            f"{what} values must have {expected_rows} rows, got shape {arr.shape}"
        )
    return arr, wrap


def simulate_counts(image: Image, plan: SamplingPlan, code: ExposureCode,
                    lambda0: float, seed: int = 0) -> PhotonCounts:
    """Simulate coded fly-scan detector counts for a phantom image.

    Expected counts are cbar * lambda0 * C exp(-A x) with A evaluated at
    the plan's micro-angles.  Finite lambda0 draws per-bin Poisson
    variates from a counter stream keyed by (seed, view, detector);
    lambda0 = inf returns the expected counts at unit reference flux.
    """
    _check_code(plan, code)
    if not (lambda0 > 0):
        raise ConfigurationError("lambda0 must be positive (or inf)")
    p_micro = project_values(image.values, image.geometry, plan.micro_angles_rad)
    transmission = apply_C(plan, code, np.exp(-p_micro))
    flux = 1.0 if math.isinf(lambda0) else lambda0
    lam_bar = code.cbar * flux * transmission
    if math.isinf(lambda0):
        return PhotonCounts(values=lam_bar, lambda0=lambda0)
    streams = np.arange(lam_bar.size, dtype=np.uint64).reshape(lam_bar.shape)
    counts = rng.poisson_counter(lam_bar, seed, streams).astype(np.float64)
    return PhotonCounts(values=counts, lambda0=lambda0)


def counts_to_projections(counts: PhotonCounts, code: ExposureCode,
                          count_floor: float = 1.0):
    """Blank-scan normalize and negative-log the counts.

    Returns (y, clamp_mask).  Noisy counts below count_floor are clamped
    up before the log so y stays finite; the mask records which bins
    were clamped.  Noiseless (lambda0 = inf) counts are exact expected
    values and are never clamped.
    """
    if not (counts.lambda0 > 0):
        raise ConfigurationError("counts carry no usable lambda0")
    noiseless = math.isinf(counts.lambda0)
    flux = 1.0 if noiseless else counts.lambda0
    blank = code.cbar * flux
    values = counts.values
    if noiseless:
        clamp_mask = np.zeros(values.shape, dtype=bool)
        safe = values
    else:
        clamp_mask = values < count_floor
        safe = np.maximum(values, count_floor)
    y = -np.log(safe / blank)
    return y, clamp_mask


def compute_weights(y, w: float | None = None) -> WeightMatrix:
    """Diagonal statistical weights w * exp(-y).

    With w omitted, w = 1 / mean(exp(-y)) so the weights average to one.
    """
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("projections must be finite")
    t = np.exp(-y)
    if w is None:
        w = 1.0 / float(t.mean())
    if w <= 0:
        raise ValueError("weight scale w must be positive")
    return WeightMatrix(values=w * t, w=w)


def bin_dense_projections(dense_y, plan: SamplingPlan, code: ExposureCode):
    """Bin a dense projection set into M_theta coded view measurements.

    y_i = -log( sum_k (c_k / cbar) exp(-dense_y[(i*K + k) mod N_theta]) ),
    evaluated per detector pixel.  dense_y must cover all N_theta
    micro-angles.
    """
    _check_code(plan, code)
    values, wrap = _unwrap(dense_y, plan.N_theta, "dense")
    idx = _coded_indices(plan, code)
    trans = np.exp(-values)[idx].sum(axis=1) / code.cbar
    out = -np.log(trans)
    if wrap is None:
        return out
    return Sinogram(values=out, angles_rad=plan.nominal_view_angles_rad, role="view")
