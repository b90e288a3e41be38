"""ADMM orchestration of the coded-exposure reconstruction.

Per outer iteration, in this order: partial projection-domain deblurring
of p toward A x - u, partial regularized reconstruction of x from
p + u, then the scaled dual update u <- u + p - A x.  Primal and dual
residuals, RMSE(Ax_t, p_t) and RMSE(Ax_t, Ax_{t-1}), are tracked every
iteration.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .acquisition import WeightMatrix
from .deblur import DeblurConfig, deblur_partial
from .projector import Geometry, Image, Sinogram, project_values
from .sampling import ExposureCode, SamplingPlan
from .tomo import PriorConfig, TomoConfig, mbir_full, tomo_partial


class NumericalDivergence(RuntimeError):
    """Raised when the primal residual blows up past the guard factor."""


@dataclass
class CodexConfig:
    """Outer-loop settings for the ADMM reconstruction."""

    outer_iterations: int = 100
    sigma: float = 1.0
    deblur: DeblurConfig = field(default_factory=DeblurConfig)
    tomo: TomoConfig = field(default_factory=TomoConfig)
    prior: PriorConfig = field(default_factory=lambda: PriorConfig(beta=1e-4))
    init: str = "mbir"  # mbir | zero | given
    init_mbir_iterations: int = 20
    primal_tol: float | None = None
    dual_tol: float | None = None
    divergence_factor: float = 1e3

    def __post_init__(self):
        if self.outer_iterations < 1:
            raise ValueError("outer_iterations must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.init not in ("mbir", "zero", "given"):
            raise ValueError(f"unknown init policy {self.init!r}")


@dataclass
class AdmmState:
    """Snapshot of the split variables after an outer iteration."""

    p: np.ndarray
    x: Image
    u: np.ndarray
    sigma: float
    iteration: int
    primal_history: list[float] = field(default_factory=list)
    dual_history: list[float] = field(default_factory=list)
    ax: np.ndarray | None = None
    ax_prev: np.ndarray | None = None


@dataclass
class CodexResult:
    image: Image
    state: AdmmState
    deblur_costs: list[list[float]] = field(default_factory=list)
    tomo_costs: list[list[float]] = field(default_factory=list)


def rmse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def residuals(state: AdmmState):
    """(primal, dual) residuals of the current state.

    primal = RMSE(Ax_t, p_t); dual = RMSE(Ax_t, Ax_{t-1}), defined for
    iteration >= 1.
    """
    if state.ax is None:
        raise ValueError("state carries no projection; run at least one iteration")
    primal = rmse(state.ax, state.p)
    if state.iteration < 1 or state.ax_prev is None:
        raise ValueError("dual residual needs iteration >= 1")
    dual = rmse(state.ax, state.ax_prev)
    return primal, dual


def codex_reconstruct(y, weights, plan: SamplingPlan, code: ExposureCode,
                      geometry: Geometry, config: CodexConfig,
                      x_init: Image | None = None, callback=None) -> CodexResult:
    """Run the full ADMM loop and return the reconstruction with history.

    y and the diagonal weights live on the (M_theta, M_d) view grid.
    callback(stage, iteration) fires after each sub-step with stage in
    {'deblur', 'tomo', 'dual'}.
    """
    y = y.values if isinstance(y, Sinogram) else np.asarray(y, dtype=np.float64)
    w = weights.values if isinstance(weights, WeightMatrix) else np.asarray(weights, dtype=np.float64)
    if y.shape != (plan.M_theta, geometry.num_detector):
        raise ValueError(f"y shape {y.shape} does not match ({plan.M_theta}, {geometry.num_detector})")
    if w.shape != y.shape:
        raise ValueError("weights must match the measurement grid")
    micro_angles = plan.micro_angles_rad
    deblur_cfg = dataclasses.replace(config.deblur, sigma=config.sigma)
    tomo_cfg = dataclasses.replace(config.tomo, sigma=config.sigma)

    x = _initialize(y, w, plan, geometry, config, x_init)
    ax = project_values(x.values, geometry, micro_angles)
    p = ax.copy()
    u = np.zeros_like(p)

    state = AdmmState(p=p, x=x, u=u, sigma=config.sigma, iteration=0)
    result = CodexResult(image=x, state=state)
    for t in range(1, config.outer_iterations + 1):
        db = deblur_partial(p, ax - u, y, w, deblur_cfg, plan, code)
        p = db.p
        result.deblur_costs.append(db.costs)
        if callback:
            callback("deblur", t)

        p_tilde = Sinogram(values=p + u, angles_rad=micro_angles, role="micro")
        tr = tomo_partial(x, p_tilde, tomo_cfg, config.prior)
        x = tr.image
        result.tomo_costs.append(tr.costs)
        if callback:
            callback("tomo", t)

        ax_prev = ax
        ax = project_values(x.values, geometry, micro_angles)
        u = u + p - ax
        if callback:
            callback("dual", t)

        state.p, state.x, state.u = p, x, u
        state.ax, state.ax_prev = ax, ax_prev
        state.iteration = t
        primal, dual = residuals(state)
        state.primal_history.append(primal)
        state.dual_history.append(dual)
        if primal > config.divergence_factor * max(state.primal_history[0], 1e-300):
            raise NumericalDivergence(
                f"primal residual {primal:.3e} exceeded {config.divergence_factor:.0e} x "
                f"its initial value {state.primal_history[0]:.3e} at iteration {t}"
            )
        if (config.primal_tol is not None and config.dual_tol is not None
                and primal <= config.primal_tol and dual <= config.dual_tol):
            break
    result.image = x
    return result


def _initialize(y, w, plan, geometry, config, x_init):
    if config.init == "given":
        if x_init is None:
            raise ValueError("init policy 'given' requires x_init")
        return x_init
    if config.init == "zero" :
        return Image(values=np.zeros((geometry.n_side, geometry.n_side)), geometry=geometry)
    warm = mbir_full(
        y,
        plan.nominal_view_angles_rad,
        geometry,
        w,
        config.prior,
        iterations=config.init_mbir_iterations,
    )
    return warm.image
