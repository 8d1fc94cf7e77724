"""
Experiment runners behind the command line.

run_noiseless   one noiseless recovery with a JSON report and signal exports
run_mse_sweep   Monte Carlo MSE table over noise variance and sampling-set size
run_check       feasibility and rank diagnostics only
run_generate    dataset generation and export

Every random draw goes through utils.sc_lib.sub_seed, so a run is fully
determined by its config. Result files carry no timestamps.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

import numpy as np

import utils.sc_io
import utils.sc_lib
import utils.sc_logging
import utils.settings
from simplicial.complex import (
    HodgeLaplacians, SimplicialComplex, betti_numbers, complex_from_dict, complex_hash, complex_to_dict,
    connected_components, hodge_laplacians,
)
from simplicial.datasets import TwoHoleConfig, small_complex, two_hole_dataset
from simplicial.errors import BandwidthError, ComplexError, ConfigError, DatasetError
from simplicial.recovery import (
    RecoveryResult, RecoverySystem, assemble_system, build_vandermonde, check_feasibility, recover,
    relative_errors, result_to_dict,
)
from simplicial.sampling import SamplingPlan, aggregate, export_observations, observe, plan_sampling
from simplicial.signals import MultiOrderSignal, add_noise, export_signal, squared_error, synthesize_bandlimited
from simplicial.spectral import SpectralBases, build_spectral_bases, max_edge_eigenvalue, scale_spectrum

BUILTIN_SOURCES = ("small", "two-hole")
SWEEP_COLUMNS = ["variance", "sample_size", "mse", "mse_x0", "mse_x2", "mse_r1", "trials", "P"]

# keys a profile may carry that are not config fields
_DESCRIPTIVE_KEYS = {"description"}


def _from_settings(name: str):
    return field(default_factory=lambda: utils.settings.get_setting(name))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "custom"
    complex_source: str = "small"
    two_hole: TwoHoleConfig = field(default_factory=TwoHoleConfig)
    w0: int = 4
    w2: int = 1
    r1: int = 2
    p_shifts: int = 6
    sample_sizes: Tuple[int, ...] = (2,)
    variances: Tuple[float, ...] = field(default_factory=lambda: (utils.settings.noise_variance,))
    trials: int = _from_settings("trials")
    master_seed: int = _from_settings("master_seed")
    output_dir: str = _from_settings("output_dir")
    spectral_scaling: bool = _from_settings("spectral_scaling")
    resample_each_trial: bool = False
    workers: int = _from_settings("workers")
    tolerance: float = 1e-6
    dataset_retries: int = 10
    rank_retries: int = 20

    def validate(self):
        if not self.complex_source:
            raise ConfigError("Complex source is empty; use 'small', 'two-hole' or a JSON path")
        for name in ("w0", "w2", "r1"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.p_shifts < 1:
            raise ConfigError(f"P must be at least 1, got {self.p_shifts}")
        if not self.sample_sizes or any(s < 1 for s in self.sample_sizes):
            raise ConfigError(f"Sampling-set sizes must be positive, got {list(self.sample_sizes)}")
        if not self.variances or any(not np.isfinite(v) or v < 0 for v in self.variances):
            raise ConfigError(f"Noise variances must be finite and nonnegative, got {list(self.variances)}")
        if self.trials < 1:
            raise ConfigError(f"Trial count must be positive, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"Worker count must be positive, got {self.workers}")
        if self.tolerance <= 0:
            raise ConfigError(f"Tolerance must be positive, got {self.tolerance}")
        if self.dataset_retries < 1 or self.rank_retries < 0:
            raise ConfigError("dataset_retries must be >= 1 and rank_retries >= 0")
        if self.complex_source == "two-hole":
            self.two_hole.validate()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "complex": self.complex_source,
            "two_hole": self.two_hole.to_dict(),
            "w0": self.w0,
            "w2": self.w2,
            "r1": self.r1,
            "p_shifts": self.p_shifts,
            "sample_sizes": list(self.sample_sizes),
            "variances": [float(v) for v in self.variances],
            "trials": self.trials,
            "master_seed": self.master_seed,
            "output_dir": self.output_dir,
            "spectral_scaling": self.spectral_scaling,
            "resample_each_trial": self.resample_each_trial,
            "workers": self.workers,
            "tolerance": self.tolerance,
            "dataset_retries": self.dataset_retries,
            "rank_retries": self.rank_retries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Build from a profile or --config document; unknown keys are an error"""
        if not isinstance(data, dict):
            raise ConfigError(f"Config must be a JSON object, got {type(data).__name__}")
        data = dict(data)
        if "complex" in data:
            data["complex_source"] = data.pop("complex")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known - _DESCRIPTIVE_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config fields: {', '.join(unknown)}")

        kwargs = {}
        try:
            for key, value in data.items():
                if key in _DESCRIPTIVE_KEYS or value is None:
                    continue
                if key == "two_hole":
                    kwargs[key] = _two_hole_from_dict(value)
                elif key == "sample_sizes":
                    kwargs[key] = tuple(int(v) for v in value)
                elif key == "variances":
                    kwargs[key] = tuple(float(v) for v in value)
                elif key in ("spectral_scaling", "resample_each_trial"):
                    kwargs[key] = _as_bool(value)
                elif key in ("name", "complex_source", "output_dir"):
                    kwargs[key] = str(value)
                elif key == "tolerance":
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = int(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Malformed config value: {e}") from e

        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


def _as_bool(value) -> bool:
    if isinstance(value, str):
        return value.lower() == "true"
    return bool(value)


def _two_hole_from_dict(data) -> TwoHoleConfig:
    if isinstance(data, TwoHoleConfig):
        return data
    if not isinstance(data, dict):
        raise ConfigError(f"two_hole must be an object, got {data!r}")
    unknown = sorted(set(data) - {f.name for f in fields(TwoHoleConfig)})
    if unknown:
        raise ConfigError(f"Unknown two_hole fields: {', '.join(unknown)}")
    kwargs = {}
    if "num_points" in data:
        kwargs["num_points"] = int(data["num_points"])
    if "seed" in data:
        kwargs["seed"] = int(data["seed"])
    if "hole_centers" in data:
        kwargs["hole_centers"] = tuple(tuple(float(v) for v in c) for c in data["hole_centers"])
    if "hole_radii" in data:
        kwargs["hole_radii"] = tuple(float(r) for r in data["hole_radii"])
    if "bbox" in data:
        kwargs["bbox"] = tuple(float(v) for v in data["bbox"])
    return TwoHoleConfig(**kwargs)


def _merge(base: dict, update: dict) -> dict:
    merged = dict(base)
    for key, value in update.items():
        if value is None:
            continue
        if key == "two_hole" and isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def build_config(profile: Optional[dict] = None, config_path: Optional[str] = None,
                 overrides: Optional[dict] = None) -> ExperimentConfig:
    """Settings defaults < profile < --config file < command-line overrides"""
    data = {}
    if profile:
        data = _merge(data, profile)
    if config_path:
        try:
            data = _merge(data, utils.sc_io.load_json(config_path))
        except (OSError, ValueError) as e:
            raise ConfigError(f"Cannot read config file {config_path}: {e}") from e
    if overrides:
        data = _merge(data, overrides)
    return ExperimentConfig.from_dict(data)


def export_complex(path: str, c: SimplicialComplex):
    utils.sc_io.save_json(path, complex_to_dict(c))


def import_complex(path: str, canonicalize: bool = False) -> SimplicialComplex:
    """Load and validate a complex JSON document"""
    try:
        data = utils.sc_io.load_json(path)
    except (OSError, ValueError) as e:
        raise ComplexError(f"Cannot read complex file {path}: {e}") from e
    return complex_from_dict(data, canonicalize=canonicalize)


@dataclass(frozen=True)
class ExperimentContext:
    cfg: ExperimentConfig
    complex: SimplicialComplex
    points: Optional[np.ndarray]
    laplacians: HodgeLaplacians
    bases: SpectralBases
    l1_operator: np.ndarray
    w0: int
    w2: int
    r1: int
    dataset_attempt: int = 0

    @property
    def w1(self) -> int:
        return self.w0 + self.w2 + self.r1


def load_experiment_complex(cfg: ExperimentConfig) -> Tuple[SimplicialComplex, Optional[np.ndarray], int]:
    """(complex, node coordinates or None, dataset attempt that succeeded)"""
    if cfg.complex_source == "small":
        return small_complex(), None, 0

    if cfg.complex_source == "two-hole":
        last_error = None
        for attempt in range(cfg.dataset_retries):
            # the configured seed itself first, derived seeds only on retries
            seed = cfg.two_hole.seed if attempt == 0 else utils.sc_lib.sub_seed(cfg.two_hole.seed, "dataset", attempt)
            dataset_cfg = replace(cfg.two_hole, seed=seed)
            try:
                c, points = two_hole_dataset(dataset_cfg)
                return c, points, attempt
            except DatasetError as e:
                utils.sc_logging.update_debug_log(f"Two-hole attempt {attempt} rejected: {e}")
                last_error = e
        raise DatasetError(f"No valid two-hole complex in {cfg.dataset_retries} attempts: {last_error}") from last_error

    return import_complex(cfg.complex_source), None, 0


def prepare_experiment(cfg: ExperimentConfig) -> ExperimentContext:
    """Complex, Laplacians and truncated bases, with W0/W2 capped at the distinct eigenvalues available"""
    cfg.validate()
    c, points, attempt = load_experiment_complex(cfg)
    laplacians = hodge_laplacians(c)

    full = build_spectral_bases(c, laplacians, distinct=True)
    w0 = min(cfg.w0, full.w0)
    w2 = min(cfg.w2, full.w2)
    if (w0, w2) != (cfg.w0, cfg.w2):
        utils.sc_logging.update_debug_log(
            f"Bandwidths capped at the distinct eigenvalues available: W0 {cfg.w0} -> {w0}, W2 {cfg.w2} -> {w2}")
    if cfg.r1 > full.harmonic_dim:
        raise BandwidthError(f"R1 = {cfg.r1} exceeds dim N(L1) = {full.harmonic_dim}")

    bases = full.truncated(w0, w2)
    l1_operator = laplacians.l1
    if cfg.spectral_scaling:
        factor = 1.0 / max_edge_eigenvalue(bases)
        bases = scale_spectrum(bases, factor)
        l1_operator = laplacians.l1 * factor

    return ExperimentContext(cfg=cfg, complex=c, points=points, laplacians=laplacians, bases=bases,
                             l1_operator=l1_operator, w0=w0, w2=w2, r1=cfg.r1, dataset_attempt=attempt)


def draw_plan(ctx: ExperimentContext, size: int, *index: int) -> Tuple[SamplingPlan, RecoverySystem]:
    """Rank-guarded sampling set, redrawn until the recovery system has full column rank.

    Redraws are pointless when P |S| < W1, so that case takes the first draw.
    The returned plan counts every redraw in `retries`.
    """
    cfg = ctx.cfg
    guard = ctx.bases.q1_perp[:, :ctx.r1] if ctx.r1 else None
    v = build_vandermonde(ctx.bases.lambda_low, ctx.bases.lambda_up, ctx.r1, cfg.p_shifts)
    d = ctx.bases.dictionary(ctx.r1)
    attempts = cfg.rank_retries + 1 if cfg.p_shifts * size >= ctx.w1 else 1

    retries = 0
    for attempt in range(attempts):
        seed = utils.sc_lib.sub_seed(cfg.master_seed, "sampling", size, *index, attempt)
        plan = plan_sampling(ctx.complex.num_edges, size, cfg.p_shifts, seed, guard)
        system = assemble_system(v, d, plan.sample_set)
        retries += plan.retries
        if system.rank_report.full_column_rank:
            break
        if attempt + 1 < attempts:
            retries += 1

    return replace(plan, retries=retries), system


def synthesize_truth(ctx: ExperimentContext, index: int = 0) -> MultiOrderSignal:
    seed = utils.sc_lib.sub_seed(ctx.cfg.master_seed, "synthesis", index)
    return synthesize_bandlimited(ctx.bases, ctx.w0, ctx.w2, ctx.r1, seed)


def recover_from_flow(ctx: ExperimentContext, x1, plan: SamplingPlan, system: RecoverySystem) -> RecoveryResult:
    """Aggregate an edge flow, observe it on the plan and solve"""
    y1 = aggregate(ctx.l1_operator, x1, plan.num_shifts)
    return recover(system, observe(y1, plan), ctx.bases)


def complex_summary(c: SimplicialComplex, dataset_attempt: int = 0) -> dict:
    return {
        "num_nodes": c.num_nodes,
        "num_edges": c.num_edges,
        "num_triangles": c.num_triangles,
        "components": connected_components(c),
        "betti": list(betti_numbers(c)),
        "hash": complex_hash(c),
        "dataset_attempt": dataset_attempt,
    }


def _bandwidths(ctx: ExperimentContext) -> dict:
    return {"w0": ctx.w0, "w2": ctx.w2, "r1": ctx.r1, "w1": ctx.w1, "spectral_scale": ctx.bases.scale}


def _output_path(cfg: ExperimentConfig, filename: str) -> str:
    return os.path.join(cfg.output_dir, filename)


def run_noiseless(cfg: ExperimentConfig) -> dict:
    """Single noiseless recovery on the first sampling-set size.

    Infeasible configs still run; the feasibility report and the rank
    diagnostics say why the recovery cannot be trusted.
    """
    ctx = prepare_experiment(cfg)
    size = cfg.sample_sizes[0]
    truth = synthesize_truth(ctx)
    plan, system = draw_plan(ctx, size, 0)

    feasibility = check_feasibility(ctx.w0, ctx.w2, ctx.r1, ctx.bases.lambda_low, ctx.bases.lambda_up,
                                    cfg.p_shifts, plan.sample_set, system.dictionary)
    if not feasibility.overall:
        utils.sc_logging.update_debug_log(f"Recovery config is infeasible: {'; '.join(feasibility.reasons())}")

    observations = observe(aggregate(ctx.l1_operator, truth.x1, cfg.p_shifts), plan)
    result = recover(system, observations, ctx.bases)
    errors = relative_errors(result, truth)
    passed = all(error <= cfg.tolerance for error in errors.values())

    report = {
        "experiment": "recover",
        "config": cfg.to_dict(),
        "complex": complex_summary(ctx.complex, ctx.dataset_attempt),
        "bandwidths": _bandwidths(ctx),
        "plan": plan.to_dict(),
        "feasibility": feasibility.to_dict(),
        "identifiable": system.rank_report.full_column_rank,
        "recovery": result_to_dict(result, truth),
        "passed": passed,
    }

    utils.sc_io.save_json(_output_path(cfg, "recover.json"), report)
    sidecar = {"complex_hash": report["complex"]["hash"], "W0": ctx.w0, "W2": ctx.w2, "R1": ctx.r1,
               "seed": utils.sc_lib.seed_label(utils.sc_lib.sub_seed(cfg.master_seed, "synthesis", 0))}
    for name, values in (("x0", truth.x0), ("x2", truth.x2), ("r1", truth.r1), ("x1", truth.x1),
                         ("x0_ls", result.x0_ls), ("x2_ls", result.x2_ls), ("r1_ls", result.r1_ls)):
        export_signal(_output_path(cfg, f"signal_{name}.csv"), values, sidecar)
    export_observations(_output_path(cfg, "observations.csv"), observations, plan)

    utils.sc_logging.log_experiment("recover", {
        "complex": cfg.complex_source,
        "relative_errors": errors,
        "rank": f"{system.rank_report.rank}/{system.rank_report.columns}",
        "feasible": feasibility.overall,
        "passed": passed,
    })
    return report


def _trial_errors(ctx: ExperimentContext, truth: MultiOrderSignal, plans: List[Tuple[SamplingPlan, RecoverySystem]],
                  variance: float) -> np.ndarray:
    """trials x 3 squared errors (x0, x2, r1); row t only ever written by trial t"""
    cfg = ctx.cfg
    errors = np.empty((cfg.trials, 3))

    def run_trial(trial: int):
        plan, system = plans[trial] if len(plans) > 1 else plans[0]
        # same noise stream for every variance and size: cells differ only by the scale
        noisy = add_noise(truth.x1, variance, utils.sc_lib.sub_seed(cfg.master_seed, "noise", trial))
        result = recover_from_flow(ctx, noisy, plan, system)
        errors[trial] = (squared_error(truth.x0, result.x0_ls),
                         squared_error(truth.x2, result.x2_ls),
                         squared_error(truth.r1, result.r1_ls))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(run_trial, range(cfg.trials)))
    else:
        for trial in range(cfg.trials):
            run_trial(trial)
    return errors


def run_mse_sweep(cfg: ExperimentConfig) -> dict:
    """MSE = (MSE(x0) + MSE(x2) + MSE(r1)) / 3 for every (variance, |S|) pair.

    One signal is synthesized per run. The sampling set is drawn once per
    size and reused across trials unless resample_each_trial is set.
    """
    ctx = prepare_experiment(cfg)
    truth = synthesize_truth(ctx)

    plans_by_size = {}
    skipped = []
    for size in cfg.sample_sizes:
        if size > ctx.complex.num_edges:
            skipped.append({"sample_size": size, "reason": f"|S| exceeds the {ctx.complex.num_edges} edges"})
            continue
        if cfg.resample_each_trial:
            plans = [draw_plan(ctx, size, trial) for trial in range(cfg.trials)]
        else:
            plans = [draw_plan(ctx, size, 0)]

        # one rank-deficient plan drops the whole size, so every row averages the same trial count
        deficient = [system.rank_report.rank for _, system in plans if not system.rank_report.full_column_rank]
        if deficient:
            reason = f"recovery system rank {min(deficient)} < W1 = {ctx.w1}"
            if len(plans) > 1:
                reason += f" in {len(deficient)} of {len(plans)} resampled plans"
            utils.sc_logging.update_debug_log(f"Skipping |S| = {size}: {reason}")
            skipped.append({"sample_size": size, "reason": reason})
            continue
        plans_by_size[size] = plans

    rows = []
    table = []
    for variance in cfg.variances:
        for size, plans in plans_by_size.items():
            errors = _trial_errors(ctx, truth, plans, float(variance))
            mse_x0, mse_x2, mse_r1 = (float(v) for v in errors.mean(axis=0))
            mse = (mse_x0 + mse_x2 + mse_r1) / 3.0
            table.append((float(variance), size, mse, mse_x0, mse_x2, mse_r1, cfg.trials, cfg.p_shifts))
            rows.append(dict(zip(SWEEP_COLUMNS, table[-1])))
            utils.sc_logging.update_debug_log(f"Sweep cell variance={variance} |S|={size}: mse={mse:.3e}")

    noiseless_limit = cfg.tolerance ** 2
    passed = bool(rows) and all(row["mse"] <= noiseless_limit for row in rows if row["variance"] == 0.0)

    csv_path = _output_path(cfg, "mse_sweep.csv")
    utils.sc_io.write_table_csv(csv_path, SWEEP_COLUMNS, table)
    report = {
        "experiment": "sweep",
        "config": cfg.to_dict(),
        "complex": complex_summary(ctx.complex, ctx.dataset_attempt),
        "bandwidths": _bandwidths(ctx),
        "plans": {str(size): [plan.to_dict() for plan, _ in plans] for size, plans in plans_by_size.items()},
        "skipped": skipped,
        "rows": rows,
        "csv": csv_path,
        "passed": passed,
    }
    utils.sc_io.save_json(_output_path(cfg, "mse_sweep.json"), report)

    utils.sc_logging.log_experiment("sweep", {
        "complex": cfg.complex_source,
        "cells": len(rows),
        "skipped": len(skipped),
        "trials": cfg.trials,
        "passed": passed,
    })
    return report


def run_check(cfg: ExperimentConfig) -> dict:
    """Feasibility report and system rank for every sampling-set size, without recovering"""
    ctx = prepare_experiment(cfg)
    checks = []
    for size in cfg.sample_sizes:
        if size > ctx.complex.num_edges:
            checks.append({"sample_size": size, "error": f"|S| exceeds the {ctx.complex.num_edges} edges",
                           "feasible": False, "identifiable": False})
            continue
        plan, system = draw_plan(ctx, size, 0)
        feasibility = check_feasibility(ctx.w0, ctx.w2, ctx.r1, ctx.bases.lambda_low, ctx.bases.lambda_up,
                                        cfg.p_shifts, plan.sample_set, system.dictionary)
        checks.append({
            "sample_size": size,
            "plan": plan.to_dict(),
            "feasibility": feasibility.to_dict(),
            "rank_report": system.rank_report.to_dict(),
            "feasible": feasibility.overall,
            "identifiable": system.rank_report.full_column_rank,
        })

    report = {
        "experiment": "check",
        "config": cfg.to_dict(),
        "complex": complex_summary(ctx.complex, ctx.dataset_attempt),
        "bandwidths": _bandwidths(ctx),
        "checks": checks,
        "feasible": all(check["feasible"] for check in checks),
    }
    utils.sc_io.save_json(_output_path(cfg, "check.json"), report)
    return report


def run_generate(cfg: ExperimentConfig) -> dict:
    """Write the experiment complex (and node coordinates for generated datasets)"""
    cfg.validate()
    c, points, attempt = load_experiment_complex(cfg)

    complex_path = _output_path(cfg, "complex.json")
    export_complex(complex_path, c)
    report = {
        "experiment": "gen",
        "config": cfg.to_dict(),
        "complex": complex_summary(c, attempt),
        "files": [complex_path],
    }
    if points is not None:
        points_path = _output_path(cfg, "points.csv")
        utils.sc_io.export_points(points_path, points)
        report["files"].append(points_path)

    utils.sc_io.save_json(_output_path(cfg, "generate.json"), report)
    return report
