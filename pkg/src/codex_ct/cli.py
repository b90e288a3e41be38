"""Experiment driver: config parsing, pipelines, and the command line.

Subcommands: simulate, reconstruct, bin, sweep, metrics,
validate-config.  Configs are JSON with a fixed schema; unknown keys
fail fast.  Every output directory carries a manifest.json from which
the run can be reproduced bit for bit.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import multiprocessing
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, arrayio
from .acquisition import (
    ConfigurationError,
    bin_dense_projections,
    compute_weights,
    counts_to_projections,
    make_phantom,
    simulate_counts,
)
from .admm import CodexConfig, NumericalDivergence, codex_reconstruct
from .baselines import FbpConfig, ifbp
from .deblur import DeblurConfig
from .metrics import curve_to_rows, mtf_report, nrmse, rmse
from .projector import Geometry
from .sampling import ExposureCode, SamplingPlan, build_code, make_sampling_plan, raskar_code
from .tomo import PriorConfig, TomoConfig, mbir_full


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


_TOP_KEYS = {
    "plan", "code", "lambda0", "seed", "geometry", "phantom", "method",
    "weights", "prior", "codex", "mbir", "ifbp", "count_floor",
}
_METHODS = ("codex", "mbir", "ifbp")


@dataclass
class ExperimentConfig:
    plan: SamplingPlan
    code: ExposureCode
    code_kind: str
    lambda0: float
    seed: int
    geometry: Geometry
    phantom_kind: str
    phantom_seed: int
    phantom_spokes: int
    method: str
    weight_scale: float | None
    prior: PriorConfig
    codex: CodexConfig
    mbir_iterations: int
    mbir_solver: str
    ifbp_cg_iterations: int
    ifbp_ridge: float
    ifbp_filter: str
    count_floor: float
    raw: dict


def _require_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _get(section, key, kind, where, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r} in {where}")
        return default
    value = section[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be an integer")
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key} has type {type(value).__name__}, expected {kind.__name__}")
    return value


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a config document and build the typed experiment setup."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, _TOP_KEYS, "config")
    for key in ("plan", "code", "geometry", "phantom", "method"):
        if key not in doc:
            raise ConfigError(f"missing required section {key!r}")

    plan_doc = doc["plan"]
    _require_keys(plan_doc, {"K", "m", "n", "M_theta"}, "plan")
    try:
        plan = make_sampling_plan(
            _get(plan_doc, "K", int, "plan", required=True),
            _get(plan_doc, "m", int, "plan", required=True),
            _get(plan_doc, "n", int, "plan", required=True),
            _get(plan_doc, "M_theta", int, "plan", required=True),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid plan: {exc}") from exc

    code_doc = doc["code"]
    _require_keys(code_doc, {"kind", "length", "bits"}, "code")
    kind = _get(code_doc, "kind", str, "code", required=True)
    length = _get(code_doc, "length", int, "code", default=plan.K)
    if length != plan.K:
        raise ConfigError(f"code length {length} must equal plan K = {plan.K}")
    try:
        if kind == "raskar":
            code = raskar_code(length)
        elif kind == "custom":
            bits_str = _get(code_doc, "bits", str, "code", required=True)
            code = build_code("custom", length, [int(c) for c in bits_str])
        elif kind in ("snapshot", "boxcar"):
            code = build_code(kind, length)
        else:
            raise ConfigError(f"unknown code kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(f"invalid code: {exc}") from exc

    lambda0 = doc.get("lambda0", "inf")
    if isinstance(lambda0, str):
        if lambda0 not in ("inf", "Infinity"):
            raise ConfigError(f"lambda0 string must be 'inf', got {lambda0!r}")
        lambda0 = math.inf
    elif isinstance(lambda0, (int, float)) and not isinstance(lambda0, bool):
        lambda0 = float(lambda0)
    else:
        raise ConfigError("lambda0 must be a positive number or 'inf'")
    if not lambda0 > 0:
        raise ConfigError("lambda0 must be positive")

    seed = _get(doc, "seed", int, "config", default=0)

    geo_doc = doc["geometry"]
    _require_keys(geo_doc, {"n_side", "pixel_pitch", "num_detector", "detector_pitch",
                            "center_offset"}, "geometry")
    try:
        geometry = Geometry(
            n_side=_get(geo_doc, "n_side", int, "geometry", required=True),
            pixel_pitch=_get(geo_doc, "pixel_pitch", float, "geometry", default=1.0),
            num_detector=_get(geo_doc, "num_detector", int, "geometry"),
            detector_pitch=_get(geo_doc, "detector_pitch", float, "geometry"),
            center_offset=_get(geo_doc, "center_offset", float, "geometry", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid geometry: {exc}") from exc

    ph_doc = doc["phantom"]
    _require_keys(ph_doc, {"kind", "seed", "spokes"}, "phantom")
    phantom_kind = _get(ph_doc, "kind", str, "phantom", required=True)
    if phantom_kind not in ("disk", "blobs", "siemens_star", "concentric_circles"):
        raise ConfigError(f"unknown phantom kind {phantom_kind!r}")
    phantom_seed = _get(ph_doc, "seed", int, "phantom", default=0)
    phantom_spokes = _get(ph_doc, "spokes", int, "phantom", default=16)

    method = doc["method"]
    if method not in _METHODS:
        raise ConfigError(f"method must be one of {_METHODS}, got {method!r}")
    if method not in doc:
        raise ConfigError(f"method {method!r} requires a (possibly empty) {method!r} section")

    w_doc = doc.get("weights", {})
    _require_keys(w_doc, {"w"}, "weights")
    weight_scale = w_doc.get("w")
    if weight_scale is not None:
        weight_scale = _get(w_doc, "w", float, "weights")

    prior_doc = doc.get("prior", {})
    _require_keys(prior_doc, {"beta", "potential", "p_exp", "q_exp", "T"}, "prior")
    try:
        prior = PriorConfig(
            beta=_get(prior_doc, "beta", float, "prior", default=1e-4),
            potential=_get(prior_doc, "potential", str, "prior", default="quadratic"),
            p_exp=_get(prior_doc, "p_exp", float, "prior", default=2.0),
            q_exp=_get(prior_doc, "q_exp", float, "prior", default=1.2),
            T=_get(prior_doc, "T", float, "prior", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid prior: {exc}") from exc

    cx_doc = doc.get("codex", {})
    _require_keys(cx_doc, {"outer_iterations", "sigma", "n_p", "n_t", "eta0", "epsilon",
                           "init", "init_mbir_iterations", "solver"}, "codex")
    try:
        codex = CodexConfig(
            outer_iterations=_get(cx_doc, "outer_iterations", int, "codex", default=100),
            sigma=_get(cx_doc, "sigma", float, "codex", default=1.0),
            deblur=DeblurConfig(
                n_p=_get(cx_doc, "n_p", int, "codex", default=5),
                eta0=_get(cx_doc, "eta0", float, "codex", default=1.0),
                epsilon=_get(cx_doc, "epsilon", float, "codex", default=1e-4),
            ),
            tomo=TomoConfig(
                n_t=_get(cx_doc, "n_t", int, "codex", default=5),
                solver=_get(cx_doc, "solver", str, "codex", default="gradient"),
            ),
            prior=prior,
            init=_get(cx_doc, "init", str, "codex", default="mbir"),
            init_mbir_iterations=_get(cx_doc, "init_mbir_iterations", int, "codex", default=20),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid codex section: {exc}") from exc

    mb_doc = doc.get("mbir", {})
    _require_keys(mb_doc, {"iterations", "solver"}, "mbir")
    mbir_iterations = _get(mb_doc, "iterations", int, "mbir", default=400)
    mbir_solver = _get(mb_doc, "solver", str, "mbir", default="gradient")
    if mbir_solver not in ("gradient", "icd"):
        raise ConfigError(f"unknown mbir solver {mbir_solver!r}")

    if_doc = doc.get("ifbp", {})
    _require_keys(if_doc, {"cg_iterations", "ridge", "filter"}, "ifbp")
    ifbp_cg = _get(if_doc, "cg_iterations", int, "ifbp", default=200)
    ifbp_ridge = _get(if_doc, "ridge", float, "ifbp", default=1e-6)
    ifbp_filter = _get(if_doc, "filter", str, "ifbp", default="ramp")
    if ifbp_filter not in ("ramp", "hamming"):
        raise ConfigError(f"unknown ifbp filter {ifbp_filter!r}")

    count_floor = _get(doc, "count_floor", float, "config", default=1.0)

    return ExperimentConfig(
        plan=plan, code=code, code_kind=kind, lambda0=lambda0, seed=seed,
        geometry=geometry, phantom_kind=phantom_kind, phantom_seed=phantom_seed,
        phantom_spokes=phantom_spokes, method=method, weight_scale=weight_scale,
        prior=prior, codex=codex, mbir_iterations=mbir_iterations,
        mbir_solver=mbir_solver, ifbp_cg_iterations=ifbp_cg, ifbp_ridge=ifbp_ridge,
        ifbp_filter=ifbp_filter, count_floor=count_floor, raw=doc,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)


def config_digest(doc: dict) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


def _write_manifest(out_dir: Path, config: ExperimentConfig, seed: int, extra: dict) -> None:
    manifest = {
        "config": config.raw,
        "config_sha256": config_digest(config.raw),
        "seed": seed,
        "codex_ct_version": __version__,
        "numpy_version": np.__version__,
    }
    manifest.update(extra)
    arrayio.atomic_write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))


def _read_manifest(data_dir: Path) -> dict:
    path = data_dir / "manifest.json"
    if not path.exists():
        raise ConfigError(f"{data_dir} has no manifest.json")
    with open(path) as fh:
        return json.load(fh)


def run_simulate(config: ExperimentConfig, out_dir, seed: int | None = None) -> dict:
    """Simulate coded data and write phantom, counts, projections, weights."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = config.seed if seed is None else seed
    plan, code, geometry = config.plan, config.code, config.geometry

    phantom = make_phantom(config.phantom_kind, geometry.n_side, seed=config.phantom_seed,
                           spokes=config.phantom_spokes, geometry=geometry)
    counts = simulate_counts(phantom, plan, code, config.lambda0, seed=seed)
    y, clamp_mask = counts_to_projections(counts, code, count_floor=config.count_floor)
    weights = compute_weights(y, w=config.weight_scale)

    plan_meta = {"K": plan.K, "m": plan.m, "n": plan.n, "N_theta": plan.N_theta,
                 "M_theta": plan.M_theta, "unique_angle": plan.unique_angle}
    code_meta = {"kind": config.code_kind, "bits": "".join(str(b) for b in code.bits)}
    lambda_repr = "inf" if math.isinf(config.lambda0) else config.lambda0

    arrayio.save_array(out / "phantom", phantom.values,
                       {"role": "image", "kind": config.phantom_kind})
    arrayio.write_pgm(out / "phantom.pgm", phantom.values)
    arrayio.save_array(out / "counts", counts.values,
                       {"role": "counts", "lambda0": lambda_repr, "seed": seed})
    arrayio.save_array(out / "projections", y, {
        "role": "view", "angles_rad": list(map(float, plan.nominal_view_angles_rad)),
        "plan": plan_meta, "code": code_meta, "lambda0": lambda_repr,
        "clamped_bins": int(clamp_mask.sum()),
    })
    arrayio.save_array(out / "weights", weights.values, {"role": "weights", "w": weights.w})
    _write_manifest(out, config, seed, {"stage": "simulate",
                                        "clamped_bins": int(clamp_mask.sum())})
    return {"out": str(out), "clamped_bins": int(clamp_mask.sum()), "y_shape": list(y.shape)}


def _reconstruct_arrays(config: ExperimentConfig, y, weights):
    """Dispatch on method; returns (image, residual rows or None)."""
    plan, code, geometry = config.plan, config.code, config.geometry
    if config.method == "codex":
        result = codex_reconstruct(y, weights, plan, code, geometry, config.codex)
        rows = [
            (t + 1, p, d)
            for t, (p, d) in enumerate(zip(result.state.primal_history,
                                           result.state.dual_history))
        ]
        return result.image, rows
    if config.method == "mbir":
        result = mbir_full(y, plan.nominal_view_angles_rad, geometry, weights,
                           config.prior, iterations=config.mbir_iterations,
                           solver=config.mbir_solver)
        return result.image, None
    result = ifbp(y, plan, code, geometry, FbpConfig(filter=config.ifbp_filter),
                  cg_iterations=config.ifbp_cg_iterations, ridge=config.ifbp_ridge)
    return result, None


def run_reconstruct(config: ExperimentConfig, data_dir, out_dir) -> dict:
    """Reconstruct from a simulated or binned data directory."""
    data = Path(data_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = _read_manifest(data)
    y, y_meta = arrayio.load_array(data / "projections")
    if y.shape[0] != config.plan.M_theta:
        raise ConfigError(
            f"data has {y.shape[0]} views but the plan expects {config.plan.M_theta}"
        )
    if y.shape[1] != config.geometry.num_detector:
        raise ConfigError(
            f"data has {y.shape[1]} detector pixels but the geometry expects "
            f"{config.geometry.num_detector}"
        )
    data_bits = y_meta.get("code", {}).get("bits")
    if data_bits and data_bits != "".join(str(b) for b in config.code.bits):
        raise ConfigError("config code does not match the code the data was acquired with")
    try:
        weights_arr, _ = arrayio.load_array(data / "weights")
    except FileNotFoundError:
        weights_arr = compute_weights(y, w=config.weight_scale).values

    try:
        image, residual_rows = _reconstruct_arrays(config, y, weights_arr)
    except NumericalDivergence:
        raise
    if not np.all(np.isfinite(image.values)):
        raise NumericalDivergence("reconstruction produced non-finite values")

    arrayio.save_array(out / "reconstruction", image.values,
                       {"role": "image", "method": config.method})
    arrayio.write_pgm(out / "reconstruction.pgm", image.values)
    if residual_rows is not None:
        arrayio.write_csv(out / "residuals.csv", ("iteration", "primal", "dual"), residual_rows)

    metrics: dict = {"method": config.method}
    phantom_path = data / "phantom.f32"
    if phantom_path.exists():
        phantom, _ = arrayio.load_array(data / "phantom")
        metrics["nrmse"] = nrmse(image.values, phantom)
        metrics["rmse"] = rmse(image.values, phantom)
    arrayio.atomic_write_text(out / "metrics.json", json.dumps(metrics, indent=2, sort_keys=True))
    _write_manifest(out, config, config.seed,
                    {"stage": "reconstruct", "data_dir": str(data),
                     "data_manifest_sha256": manifest.get("config_sha256")})
    return metrics


def run_bin(config: ExperimentConfig, dense_base, out_dir) -> dict:
    """Bin a dense projection set into coded view measurements."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dense, dense_meta = arrayio.load_array(dense_base)
    plan, code = config.plan, config.code
    if dense.shape[0] != plan.N_theta:
        raise ConfigError(
            f"dense data has {dense.shape[0]} rows but the plan needs N_theta = {plan.N_theta}"
        )
    y = bin_dense_projections(dense, plan, code)
    weights = compute_weights(y, w=config.weight_scale)
    plan_meta = {"K": plan.K, "m": plan.m, "n": plan.n, "N_theta": plan.N_theta,
                 "M_theta": plan.M_theta, "unique_angle": plan.unique_angle}
    code_meta = {"kind": config.code_kind, "bits": "".join(str(b) for b in code.bits)}
    arrayio.save_array(out / "projections", y, {
        "role": "view", "angles_rad": list(map(float, plan.nominal_view_angles_rad)),
        "plan": plan_meta, "code": code_meta, "source": str(dense_base),
    })
    arrayio.save_array(out / "weights", weights.values, {"role": "weights", "w": weights.w})
    _write_manifest(out, config, config.seed, {"stage": "bin", "source": str(dense_base)})
    return {"out": str(out), "y_shape": list(y.shape)}


def _plan_for_code_length(base: SamplingPlan, K: int) -> SamplingPlan:
    """Keep N_theta and M_theta, re-derive (m, n) for a new code length.

    m = floor(N/K) + 1 gives the smallest valid m, with n = m*K - N in
    [1, K]; gcd(K, n) = gcd(K, N) so uniqueness carries over.
    """
    N = base.N_theta
    m = (N + K) // K
    n = m * K - N
    if n == 0:
        m += 1
        n = K
    return make_sampling_plan(K, m, n, base.M_theta)


def _sweep_cell(args):
    base_doc, code_kind, code_length, lam, seeds = args
    doc = json.loads(json.dumps(base_doc))  # deep copy
    doc["code"] = {"kind": code_kind, "length": code_length}
    doc["lambda0"] = "inf" if lam in ("inf", math.inf) else lam
    base_plan_doc = doc["plan"]
    base_plan = make_sampling_plan(base_plan_doc["K"], base_plan_doc["m"],
                                   base_plan_doc["n"], base_plan_doc["M_theta"])
    plan = _plan_for_code_length(base_plan, code_length)
    doc["plan"] = {"K": plan.K, "m": plan.m, "n": plan.n, "M_theta": plan.M_theta}
    try:
        config = parse_config(doc)
        rmses, nrmses = [], []
        for seed in seeds:
            phantom = make_phantom(config.phantom_kind, config.geometry.n_side,
                                   seed=config.phantom_seed, spokes=config.phantom_spokes,
                                   geometry=config.geometry)
            counts = simulate_counts(phantom, config.plan, config.code, config.lambda0,
                                     seed=seed)
            y, _ = counts_to_projections(counts, config.code, config.count_floor)
            weights = compute_weights(y, w=config.weight_scale)
            image, _ = _reconstruct_arrays(config, y, weights.values)
            rmses.append(rmse(image.values, phantom.values))
            nrmses.append(nrmse(image.values, phantom.values))
        return (code_kind, code_length, lam, len(seeds),
                float(np.mean(rmses)), float(np.std(rmses)), float(np.mean(nrmses)), "")
    except Exception as exc:  # recorded per cell, not fatal
        return (code_kind, code_length, lam, len(seeds),
                float("nan"), float("nan"), float("nan"), f"{type(exc).__name__}: {exc}")


def run_sweep(config: ExperimentConfig, sweep_doc: dict, out_dir, threads: int = 1) -> list:
    """Grid over codes, code lengths, and flux levels, averaged over seeds."""
    _require_keys(sweep_doc, {"codes", "code_lengths", "lambda0", "seeds"}, "sweep")
    codes = sweep_doc.get("codes", ["snapshot", "boxcar", "raskar"])
    lengths = sweep_doc.get("code_lengths", [config.plan.K])
    lams = sweep_doc.get("lambda0")
    if not lams:
        raise ConfigError("sweep needs a nonempty lambda0 list")
    seeds = sweep_doc.get("seeds", [0])
    cells = [
        (config.raw, ck, int(cl), lam, list(seeds))
        for ck in codes for cl in lengths for lam in lams
    ]
    if threads > 1:
        # spawn: forking is unsafe once the jit threading layer is live
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(cell) for cell in cells]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    arrayio.write_csv(
        out / "sweep.csv",
        ("code", "code_length", "lambda0", "seeds", "rmse_mean", "rmse_std",
         "nrmse_mean", "error"),
        rows,
    )
    _write_manifest(out, config, config.seed, {"stage": "sweep", "sweep": sweep_doc})
    return rows


def run_metrics(recon_dir, data_dir, out_path=None, spokes: int = 16) -> dict:
    """NRMSE/RMSE of a reconstruction directory against its data's phantom."""
    recon, recon_meta = arrayio.load_array(Path(recon_dir) / "reconstruction")
    data = Path(data_dir)
    result: dict = {"method": recon_meta.get("method")}
    phantom_base = data / "phantom"
    if (data / "phantom.f32").exists():
        phantom, ph_meta = arrayio.load_array(phantom_base)
        result["nrmse"] = nrmse(recon, phantom)
        result["rmse"] = rmse(recon, phantom)
        kind = ph_meta.get("kind")
        if kind in ("siemens_star", "concentric_circles"):
            curves = mtf_report(recon, kind, spokes=spokes)
            rows = [row for c in curves for row in curve_to_rows(c)]
            target = Path(out_path).parent if out_path else Path(recon_dir)
            arrayio.write_csv(target / "mtf.csv",
                              ("frequency", "magnitude", "direction", "radius"), rows)
            result["mtf_csv"] = str(target / "mtf.csv")
    text = json.dumps(result, indent=2, sort_keys=True)
    if out_path:
        arrayio.atomic_write_text(out_path, text)
    else:
        print(text)
    return result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="codex-ct",
                                     description="Coded-exposure fly-scan CT experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, data=False, dense=False, sweep=False, recon=False):
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
        if data:
            p.add_argument("--data", required=True, help="input data directory")
        if dense:
            p.add_argument("--dense", required=True,
                           help="dense projections base path (without .f32)")
        if sweep:
            p.add_argument("--sweep", required=True, help="sweep spec JSON")

    add_common(sub.add_parser("simulate", help="simulate coded measurements"))
    add_common(sub.add_parser("reconstruct", help="reconstruct from a data directory"), data=True)
    add_common(sub.add_parser("bin", help="bin dense projections into coded views"), dense=True)
    add_common(sub.add_parser("sweep", help="run a code/flux sweep"), sweep=True)

    pm = sub.add_parser("metrics", help="evaluate a reconstruction directory")
    pm.add_argument("--recon", required=True)
    pm.add_argument("--data", required=True)
    pm.add_argument("--out", default=None, help="metrics JSON path (default: print)")
    pm.add_argument("--spokes", type=int, default=16)

    pv = sub.add_parser("validate-config", help="parse and check a config")
    pv.add_argument("--config", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "validate-config":
            load_config(args.config)
            print("config ok")
            return 0
        if args.command == "metrics":
            run_metrics(args.recon, args.data, args.out, spokes=args.spokes)
            return 0
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed,
                                         raw={**config.raw, "seed": args.seed})
        if args.command == "simulate":
            info = run_simulate(config, args.out)
            print(json.dumps(info))
        elif args.command == "reconstruct":
            info = run_reconstruct(config, args.data, args.out)
            print(json.dumps(info))
        elif args.command == "bin":
            info = run_bin(config, args.dense, args.out)
            print(json.dumps(info))
        elif args.command == "sweep":
            try:
                with open(args.sweep) as fh:
                    sweep_doc = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read sweep spec: {exc}") from exc
            run_sweep(config, sweep_doc, args.out, threads=args.threads)
        return 0
    except (ConfigError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalDivergence, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
