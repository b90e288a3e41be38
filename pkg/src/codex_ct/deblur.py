"""Projection-domain MAP deblurring: cost, gradient, and partial solver.

Minimizes, over the micro-projections p,

    f(p) = 1/2 ||y + log(C exp(-p))||^2_D + 1/(2 sigma^2) ||p - p_tilde||^2

by gradient descent with Armijo backtracking.  C acts along the angle
axis only, so every detector pixel is an independent problem; the line
search shares one step size across all pixels because the cost is
global.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .acquisition import WeightMatrix, apply_C, apply_C_transpose
from .sampling import ExposureCode, SamplingPlan

_EXP_CLAMP = 50.0  # |p| beyond this is clamped before exponentiation


@dataclass
class DeblurConfig:
    """Partial-update settings for the deblurring operator."""

    n_p: int = 5
    eta0: float = 1.0
    epsilon: float = 1e-4
    sigma: float = 1.0
    max_halvings: int = 30

    def __post_init__(self):
        if self.n_p < 1 or self.eta0 <= 0 or self.max_halvings < 1:
            raise ValueError("n_p, eta0, max_halvings must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive (inf disables the proximal term)")


@dataclass
class DeblurResult:
    p: np.ndarray
    costs: list[float] = field(default_factory=list)
    stalled: int = 0
    clamped: int = 0


def _weight_values(weights) -> np.ndarray:
    if isinstance(weights, WeightMatrix):
        return weights.values
    return np.asarray(weights, dtype=np.float64)


def _clamped_exp_neg(p: np.ndarray):
    clipped = np.clip(p, -_EXP_CLAMP, _EXP_CLAMP)
    n_clamped = int(np.count_nonzero(clipped != p))
    return np.exp(-clipped), n_clamped


def _residual(p, y, plan, code):
    """r = y + log(C exp(-p)) and the intermediate C exp(-p)."""
    exp_neg_p, n_clamped = _clamped_exp_neg(p)
    t = apply_C(plan, code, exp_neg_p)
    return y + np.log(t), t, exp_neg_p, n_clamped


def deblur_cost(p, p_tilde, y, weights, sigma, plan: SamplingPlan, code: ExposureCode) -> float:
    """Weighted data misfit plus the proximal coupling term."""
    p = np.asarray(p, dtype=np.float64)
    d = _weight_values(weights)
    r, _, _, _ = _residual(p, y, plan, code)
    data = 0.5 * float(np.sum(d * r * r))
    if math.isinf(sigma):
        return data
    diff = p - p_tilde
    return data + float(np.sum(diff * diff)) / (2.0 * sigma**2)


def deblur_gradient(p, p_tilde, y, weights, sigma, plan: SamplingPlan, code: ExposureCode) -> np.ndarray:
    """Gradient of the deblurring cost, computed per detector pixel.

    g = -exp(-p) * C^T [ D r / (C exp(-p)) ] + (p - p_tilde) / sigma^2.
    """
    p = np.asarray(p, dtype=np.float64)
    d = _weight_values(weights)
    r, t, exp_neg_p, _ = _residual(p, y, plan, code)
    g = -exp_neg_p * apply_C_transpose(plan, code, d * r / t)
    if not math.isinf(sigma):
        g += (p - p_tilde) / sigma**2
    return g


def deblur_partial(p_init, p_tilde, y, weights, config: DeblurConfig,
                   plan: SamplingPlan, code: ExposureCode) -> DeblurResult:
    """Fixed number of Armijo-backtracked gradient steps from p_init.

    Runs exactly config.n_p iterations; each step size starts at eta0
    and halves until f(p - eta g) <= f(p) - eta epsilon ||g||^2.  When
    max_halvings is exhausted the iterate is left unchanged for that
    iteration and the stall counter increments.  The returned cost
    history is non-increasing.
    """
    p = np.asarray(p_init, dtype=np.float64).copy()
    p_tilde = np.asarray(p_tilde, dtype=np.float64)
    d = _weight_values(weights)
    sigma = config.sigma
    result = DeblurResult(p=p)

    def cost(q):
        return deblur_cost(q, p_tilde, y, d, sigma, plan, code)

    f_curr = cost(p)
    result.costs.append(f_curr)
    for _ in range(config.n_p):
        _, _, _, n_clamped = _residual(p, y, plan, code)
        result.clamped += n_clamped
        g = deblur_gradient(p, p_tilde, y, d, sigma, plan, code)
        g_sq = float(np.sum(g * g))
        eta = config.eta0
        accepted = False
        for _ in range(config.max_halvings + 1):
            candidate = p - eta * g
            f_cand = cost(candidate)
            if f_cand <= f_curr - eta * config.epsilon * g_sq:
                accepted = True
                break
            eta *= 0.5
        if accepted:
            p = candidate
            f_curr = f_cand
        else:
            result.stalled += 1
        result.costs.append(f_curr)
    if any(b > a + 1e-12 * (1 + abs(a)) for a, b in zip(result.costs, result.costs[1:])):
        raise RuntimeError("deblurring cost increased; line search is inconsistent")
    result.p = p
    return result
