"""Acceptance suite: one test per criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  The expensive criteria use fixed configs (seeds, sizes, solver
settings) chosen once; every tolerance is stated inline.
"""

import math
import time

import numpy as np
import pytest

from codex_ct.acquisition import (
    apply_C,
    apply_C_transpose,
    compute_weights,
    counts_to_projections,
    simulate_counts,
)
from codex_ct.admm import CodexConfig, codex_reconstruct
from codex_ct.baselines import FbpConfig, ifbp
from codex_ct.deblur import deblur_cost, deblur_gradient
from codex_ct.metrics import mtf_at, mtf_report, nrmse, rmse
from codex_ct.phantoms import make_phantom
from codex_ct.projector import Geometry, Image, Sinogram, backproject_values, project_values
from codex_ct.sampling import build_code, make_sampling_plan, raskar_code
from codex_ct.tomo import PriorConfig, TomoConfig, mbir_full, tomo_partial


def report(criterion: int, ok: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


# --------------------------------------------------------------- criterion 1
def test_criterion_1_parameter_table():
    t0 = time.time()
    rows = [
        (52, 2, 27, 77, 121.56),
        (52, 5, 27, 233, 40.17),
        (52, 10, 27, 493, 18.98),
        (52, 20, 27, 1013, 9.24),
    ]
    ok = True
    for K, m, n, n_theta, blur_deg in rows:
        plan = make_sampling_plan(K, m, n, M_theta=1)
        ok &= plan.N_theta == n_theta
        ok &= abs(plan.blur_angle_deg - blur_deg) <= 0.01
    elapsed = time.time() - t0
    report(1, ok and elapsed < 1.0,
           f"4/4 parameter rows exact (N_theta integer, blur angle +-0.01 deg), {elapsed:.3f}s")


# --------------------------------------------------------------- criterion 2
def test_criterion_2_angle_theorems_exhaustive():
    t0 = time.time()
    # view-stride bijection: i -> i*K mod N is a bijection for all
    # co-prime (K, N) with N <= 500
    bad = 0
    for N in range(1, 501):
        i = np.arange(N, dtype=np.int64)
        for K in range(1, N + 1):
            if math.gcd(K, N) != 1:
                continue
            if len(np.unique((i * K) % N)) != N:
                bad += 1
    # co-prime construction: gcd(K, n) = 1 implies gcd(K, m*K - n) = 1
    for K in range(1, 101):
        for n in range(1, K + 1):
            if math.gcd(K, n) != 1:
                continue
            for m in range(1, 21):
                if m * K > n and math.gcd(K, m * K - n) != 1:
                    bad += 1
    elapsed = time.time() - t0
    report(2, bad == 0 and elapsed < 30.0,
           f"0 counterexamples over both exhaustive ranges, {elapsed:.1f}s")


# --------------------------------------------------------------- criterion 3
def test_criterion_3_operator_correctness():
    rng = np.random.default_rng(42)
    worst_proj = 0.0
    for n_side in (16, 64):
        geom = Geometry(n_side=n_side)
        for _ in range(50):
            angles = rng.uniform(0, np.pi, size=7)
            x = rng.normal(size=(n_side, n_side))
            s = rng.normal(size=(7, geom.num_detector))
            ax = project_values(x, geom, angles)
            aty = backproject_values(s, geom, angles)
            rel = abs(np.vdot(ax, s) - np.vdot(x, aty)) / (
                np.linalg.norm(ax) * np.linalg.norm(s) + 1e-300)
            worst_proj = max(worst_proj, rel)

    plan = make_sampling_plan(52, 5, 27, 100)
    code = raskar_code(52)
    worst_c = 0.0
    for _ in range(20):
        u = rng.normal(size=(plan.N_theta, 5))
        v = rng.normal(size=(plan.M_theta, 5))
        lhs = np.vdot(apply_C(plan, code, u), v)
        rhs = np.vdot(u, apply_C_transpose(plan, code, v))
        worst_c = max(worst_c, abs(lhs - rhs) / (abs(lhs) + 1.0))
    ones = np.ones((plan.N_theta, 3))
    row_err = float(np.max(np.abs(apply_C(plan, code, ones) - 1.0)))

    ok = worst_proj <= 1e-6 and worst_c <= 1e-12 and row_err <= 1e-12
    report(3, ok, f"projector adjoint {worst_proj:.2e} (<=1e-6), "
                  f"C adjoint {worst_c:.2e} (<=1e-12), row sums {row_err:.2e} (<=1e-12)")


# --------------------------------------------------------------- criterion 4
def test_criterion_4_gradient_finite_differences():
    t0 = time.time()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        K = int(rng.integers(1, 9))
        N = int(rng.integers(max(2, K), 14))
        m = (N + K) // K
        n = m * K - N
        if n == 0:
            m, n = m + 1, K
        plan = make_sampling_plan(K, m, n, M_theta=int(rng.integers(1, 9)))
        bits = rng.integers(0, 2, size=K)
        if bits.sum() == 0:
            bits[0] = 1
        code = build_code("custom", K, bits)
        m_d = int(rng.integers(1, 5))
        p = rng.normal(size=(plan.N_theta, m_d))
        p_tilde = p + rng.normal(scale=0.3, size=p.shape)
        y = rng.normal(size=(plan.M_theta, m_d))
        d = rng.uniform(0.2, 2.0, size=y.shape)
        sigma = float(rng.uniform(0.5, 3.0))
        g = deblur_gradient(p, p_tilde, y, d, sigma, plan, code)
        scale = max(float(np.abs(g).max()), 1e-8)
        h = 1e-5
        flat = p.reshape(-1)
        for idx in rng.choice(flat.size, size=min(5, flat.size), replace=False):
            e = np.zeros_like(flat)
            e[idx] = h
            fp = deblur_cost((flat + e).reshape(p.shape), p_tilde, y, d, sigma, plan, code)
            fm = deblur_cost((flat - e).reshape(p.shape), p_tilde, y, d, sigma, plan, code)
            worst = max(worst, abs(g.reshape(-1)[idx] - (fp - fm) / (2 * h)) / scale)
    elapsed = time.time() - t0
    report(4, worst <= 1e-4 and elapsed < 60.0,
           f"gradient vs central differences, worst relative {worst:.2e} (<=1e-4), {elapsed:.1f}s")


# --------------------------------------------------------------- criterion 5
def test_criterion_5_subsolver_oracle():
    rng = np.random.default_rng(6)
    geom = Geometry(n_side=16)
    angles = np.linspace(0, np.pi, 24, endpoint=False)
    truth = make_phantom("blobs", 16, seed=2, geometry=geom)
    p_vals = project_values(truth.values, geom, angles) + 0.01 * rng.normal(
        size=(24, geom.num_detector))
    sigma, beta = 1.3, 0.05

    cols = []
    for j in range(256):
        e = np.zeros(256)
        e[j] = 1.0
        cols.append(project_values(e.reshape(16, 16), geom, angles).ravel())
    A = np.array(cols).T
    from codex_ct.tomo import _NEIGHBOR_OFFSETS

    L = np.zeros((256, 256))
    for r in range(16):
        for c in range(16):
            s_idx = r * 16 + c
            for dr, dc, w in _NEIGHBOR_OFFSETS:
                rr, cc = r + dr, c + dc
                if 0 <= rr < 16 and 0 <= cc < 16:
                    t_idx = rr * 16 + cc
                    L[s_idx, s_idx] += w
                    L[t_idx, t_idx] += w
                    L[s_idx, t_idx] -= w
                    L[t_idx, s_idx] -= w
    H = A.T @ A / sigma**2 + beta * L
    x_dense = np.linalg.solve(H, A.T @ p_vals.ravel() / sigma**2)

    p = Sinogram(p_vals, angles)
    x0 = Image(np.zeros((16, 16)), geom)
    result = tomo_partial(x0, p, TomoConfig(n_t=400, sigma=sigma), PriorConfig(beta=beta))
    err = np.linalg.norm(result.image.values.ravel() - x_dense) / np.linalg.norm(x_dense)
    report(5, err <= 1e-4, f"converged sub-solver vs dense normal equations, rel {err:.2e} (<=1e-4)")


# ------------------------------------------------ shared heavyweight setups
def _table2_setup(code_kind):
    geom = Geometry(n_side=64, pixel_pitch=4.0 / 64)
    plan = make_sampling_plan(52, 5, 27, 233)
    code = build_code(code_kind, 52) if code_kind != "raskar" else raskar_code(52)
    img = make_phantom("blobs", 64, seed=1, geometry=geom)
    counts = simulate_counts(img, plan, code, lambda0=math.inf)
    y, _ = counts_to_projections(counts, code)
    return geom, plan, code, img, y, compute_weights(y)


# --------------------------------------------------------------- criterion 6
def test_criterion_6_snapshot_equivalence():
    t0 = time.time()
    geom, plan, code, img, y, weights = _table2_setup("snapshot")
    prior = PriorConfig(beta=1e-4)
    n_mbir = nrmse(
        mbir_full(y, plan.nominal_view_angles_rad, geom, weights, prior, 400).image.values,
        img.values)
    cfg = CodexConfig(outer_iterations=50, sigma=1.0, prior=prior, init_mbir_iterations=20)
    n_codex = nrmse(codex_reconstruct(y, weights, plan, code, geom, cfg).image.values, img.values)
    diff = abs(n_codex - n_mbir)
    elapsed = time.time() - t0
    report(6, diff <= 0.01 and elapsed < 300.0,
           f"snapshot: NRMSE codex {n_codex:.4f} vs mbir {n_mbir:.4f}, |diff| {diff:.4f} (<=0.01), {elapsed:.0f}s")


# --------------------------------------------------------------- criterion 7
def test_criterion_7_blur_inversion():
    t0 = time.time()
    geom, plan, code, img, y, weights = _table2_setup("boxcar")
    prior = PriorConfig(beta=1e-4)
    n_mbir = nrmse(
        mbir_full(y, plan.nominal_view_angles_rad, geom, weights, prior, 400).image.values,
        img.values)
    cfg = CodexConfig(outer_iterations=50, sigma=1.0, prior=prior, init_mbir_iterations=20)
    n_codex = nrmse(codex_reconstruct(y, weights, plan, code, geom, cfg).image.values, img.values)
    elapsed = time.time() - t0
    report(7, n_codex <= 0.5 * n_mbir and elapsed < 600.0,
           f"boxcar blur inverted: NRMSE codex {n_codex:.4f} <= 0.5 x mbir {n_mbir:.4f}, {elapsed:.0f}s")


# --------------------------------------------------------------- criterion 8
def test_criterion_8_residual_convergence():
    geom = Geometry(n_side=64, pixel_pitch=4.0 / 64)
    plan = make_sampling_plan(52, 5, 27, 100)
    img = make_phantom("blobs", 64, seed=1, geometry=geom)
    prior = PriorConfig(beta=1e-4)
    details = []
    ok = True
    for code in (build_code("boxcar", 52), raskar_code(52)):
        counts = simulate_counts(img, plan, code, lambda0=1e4, seed=0)
        y, _ = counts_to_projections(counts, code)
        cfg = CodexConfig(outer_iterations=50, sigma=1.0, prior=prior, init_mbir_iterations=20)
        r = codex_reconstruct(y, compute_weights(y), plan, code, geom, cfg)
        ph, dh = r.state.primal_history, r.state.dual_history
        p_ratio, d_ratio = ph[49] / ph[4], dh[49] / dh[4]
        ok &= p_ratio < 0.5 and d_ratio < 0.5
        details.append(f"primal x{p_ratio:.3f}, dual x{d_ratio:.3f}")
    report(8, ok, f"iteration-50 residuals vs iteration-5 (<0.5): boxcar {details[0]}; "
                  f"fluttered {details[1]}")


# --------------------------------------------------------------- criterion 9
def test_criterion_9_flux_ordering():
    t0 = time.time()
    geom = Geometry(n_side=64, pixel_pitch=4.0 / 64)
    plan = make_sampling_plan(52, 5, 27, 100)
    img = make_phantom("blobs", 64, seed=1, geometry=geom)
    prior = PriorConfig(beta=1e-4)
    codes = {"snapshot": build_code("snapshot", 52),
             "boxcar": build_code("boxcar", 52),
             "fluttered": raskar_code(52)}
    means = {}
    for lam in (100.0, 1e6):
        for name, code in codes.items():
            vals = []
            for seed in range(5):
                counts = simulate_counts(img, plan, code, lambda0=lam, seed=seed)
                y, _ = counts_to_projections(counts, code)
                cfg = CodexConfig(outer_iterations=30, sigma=1.0, prior=prior,
                                  init_mbir_iterations=15)
                r = codex_reconstruct(y, compute_weights(y), plan, code, geom, cfg)
                vals.append(rmse(r.image.values, img.values))
            means[(lam, name)] = float(np.mean(vals))
    low_ok = (means[(100.0, "boxcar")] < means[(100.0, "snapshot")]
              and means[(100.0, "fluttered")] < means[(100.0, "snapshot")])
    high_ok = (means[(1e6, "snapshot")] < means[(1e6, "boxcar")]
               and means[(1e6, "snapshot")] < means[(1e6, "fluttered")])
    elapsed = time.time() - t0
    detail = (f"lam=100 RMSE snap {means[(100.0,'snapshot')]:.3f} / box "
              f"{means[(100.0,'boxcar')]:.3f} / flut {means[(100.0,'fluttered')]:.3f}; "
              f"lam=1e6 snap {means[(1e6,'snapshot')]:.4f} lowest, {elapsed:.0f}s")
    report(9, low_ok and high_ok and elapsed < 1800.0, detail)


# -------------------------------------------------------------- criterion 10
def test_criterion_10_short_scan_ordering():
    t0 = time.time()
    geom = Geometry(n_side=128, pixel_pitch=4.0 / 128)
    img = make_phantom("blobs", 128, seed=1, geometry=geom)
    prior = PriorConfig(beta=1e-3)
    res = {}

    plan_slow = make_sampling_plan(1, 1014, 1, 40)
    code_slow = build_code("snapshot", 1)
    counts = simulate_counts(img, plan_slow, code_slow, lambda0=520000.0, seed=0)
    y, _ = counts_to_projections(counts, code_slow)
    res["slow-MBIR"] = nrmse(
        mbir_full(y, plan_slow.nominal_view_angles_rad, geom, compute_weights(y),
                  prior, 400).image.values, img.values)

    plan_fast = make_sampling_plan(52, 20, 27, 40)
    code_box = build_code("boxcar", 52)
    counts = simulate_counts(img, plan_fast, code_box, lambda0=10000.0, seed=0)
    y_fast, _ = counts_to_projections(counts, code_box)
    w_fast = compute_weights(y_fast)
    res["fast-MBIR"] = nrmse(
        mbir_full(y_fast, plan_fast.nominal_view_angles_rad, geom, w_fast,
                  prior, 400).image.values, img.values)
    res["fast-IFBP"] = nrmse(
        ifbp(y_fast, plan_fast, code_box, geom, FbpConfig(), 200, 1e-6).values, img.values)
    cfg = CodexConfig(outer_iterations=60, sigma=3.0, prior=prior, init_mbir_iterations=20)
    res["fast-CodEx"] = nrmse(
        codex_reconstruct(y_fast, w_fast, plan_fast, code_box, geom, cfg).image.values,
        img.values)

    elapsed = time.time() - t0
    order_ok = res["fast-CodEx"] < res["fast-IFBP"] < res["fast-MBIR"] < res["slow-MBIR"]
    detail = (f"NRMSE fast-CodEx {res['fast-CodEx']:.4f} < fast-IFBP {res['fast-IFBP']:.4f} "
              f"< fast-MBIR {res['fast-MBIR']:.4f} < slow-MBIR {res['slow-MBIR']:.4f}, "
              f"slow > 0.4, {elapsed:.0f}s")
    report(10, order_ok and res["slow-MBIR"] > 0.4 and elapsed < 1800.0, detail)


# -------------------------------------------------------------- criterion 11
def test_criterion_11_mtf_directions():
    geom = Geometry(n_side=128, pixel_pitch=4.0 / 128)
    plan = make_sampling_plan(52, 5, 27, 233)
    prior = PriorConfig(beta=1e-4)
    cfg = CodexConfig(outer_iterations=60, sigma=1.0, prior=prior, init_mbir_iterations=20)
    codes = {"boxcar": build_code("boxcar", 52), "fluttered": raskar_code(52)}

    def reconstruct(phantom_kind):
        out = {}
        img = make_phantom(phantom_kind, 128, spokes=12, geometry=geom)
        for name, code in codes.items():
            counts = simulate_counts(img, plan, code, lambda0=math.inf)
            y, _ = counts_to_projections(counts, code)
            out[name] = codex_reconstruct(y, compute_weights(y), plan, code, geom, cfg).image
        return out

    star = reconstruct("siemens_star")
    tang = {name: mtf_report(image, "siemens_star", spokes=12)[1]  # far radius
            for name, image in star.items()}
    t_box = mtf_at(tang["boxcar"], 0.25)
    t_flut = mtf_at(tang["fluttered"], 0.25)

    rings = reconstruct("concentric_circles")
    radial = {name: mtf_report(image, "concentric_circles") for name, image in rings.items()}
    max_diff = 0.0
    for idx in (0, 1):
        cb, cf = radial["boxcar"][idx], radial["fluttered"][idx]
        sel = cb.frequencies <= 0.25
        interp = np.interp(cb.frequencies[sel], cf.frequencies, cf.magnitudes)
        max_diff = max(max_diff, float(np.max(np.abs(cb.magnitudes[sel] - interp))))

    ok = t_flut >= t_box and max_diff <= 0.10
    report(11, ok, f"tangential MTF at far radius, f=0.25: fluttered {t_flut:.3f} >= "
                   f"boxcar {t_box:.3f}; radial curves max |diff| {max_diff:.3f} (<=0.10)")
