"""Monte Carlo experiments, timing profiles and CSV/JSON emission."""
from __future__ import annotations

import csv
import enum
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .fpcore import build_surrogate_matrices, update_alpha, update_beta
from .model import SystemConfig, default_config, effective_channels, generate_channels
from .solver import SolverOptions, default_init, psla_theta, psla_w, solve_fp_psla

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "FPPSLA_OUTPUT_DIR"
DEFAULT_TRIALS = 100


class Mode(str, enum.Enum):
    SINGLE = "single"
    CONVERGENCE = "convergence"
    SWEEP_N = "sweep_n"
    SWEEP_SNR = "sweep_snr"
    TIMING = "timing"


DEFAULT_VALUES = {
    Mode.SINGLE: [20.0],
    Mode.CONVERGENCE: [0.0, 10.0, 20.0],
    Mode.SWEEP_N: [16, 32, 64, 128],
    Mode.SWEEP_SNR: [0.0, 5.0, 10.0, 15.0, 20.0],
    Mode.TIMING: [16, 32, 64, 128, 256],
}

COLUMNS = {
    Mode.SINGLE: ["outer_iter", "wsr", "elapsed_s"],
    Mode.CONVERGENCE: ["snr_db", "trial", "outer_iter", "wsr", "elapsed_s"],
    Mode.SWEEP_N: ["n", "mean_wsr", "std_wsr", "mean_time_s"],
    Mode.SWEEP_SNR: ["snr_db", "mean_wsr", "std_wsr", "mean_time_s"],
    Mode.TIMING: ["n", "mean_inner_theta_time_s", "inner_iters"],
}


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results"))


@dataclass
class ExperimentSpec:
    mode: Mode
    trials: int = DEFAULT_TRIALS
    sweep_values: list = field(default_factory=list)
    base_config: SystemConfig = field(default_factory=default_config)
    output_path: Path | None = None
    parallel_workers: int = 1
    snr_db: float = 20.0

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallel_workers < 1:
            raise ValueError("parallel_workers must be >= 1")
        if not self.sweep_values:
            self.sweep_values = list(DEFAULT_VALUES[self.mode])
        if self.output_path is None:
            suffix = ".json" if self.mode is Mode.SINGLE else ".csv"
            self.output_path = default_output_dir() / f"{self.mode.value}{suffix}"
        self.output_path = Path(self.output_path)

    @property
    def seed(self) -> int:
        return self.base_config.rng_seed


def trial_seed(base_seed: int, trial: int) -> int:
    return base_seed + trial


def run_trial(config: SystemConfig, seed: int, opts: SolverOptions | None = None):
    """Draw one channel realization (user drop and fading) and solve it."""
    channels = generate_channels(config, np.random.default_rng(seed))
    return solve_fp_psla(channels, config, opts or SolverOptions.from_config(config))


def _trial_summary(args):
    config, seed = args
    report = run_trial(config, seed)
    return {
        "seed": seed,
        "wsr_trajectory": report.wsr_trajectory,
        "outer_times": report.outer_times,
        "final_wsr": report.final_wsr,
        "wall_time_total": report.wall_time_total,
        "termination": report.termination.value,
        "outer_iters": report.outer_iters,
    }


def run_trials(config: SystemConfig, trials: int, workers: int = 1, base_seed: int | None = None):
    """Solve ``trials`` realizations; results are ordered by trial index."""
    base_seed = config.rng_seed if base_seed is None else base_seed
    jobs = [(config, trial_seed(base_seed, t)) for t in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_trial_summary, jobs))
    return [_trial_summary(job) for job in jobs]


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".15g")


def write_csv(path, columns, rows, spec: ExperimentSpec, notes=()):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(
            f"# fppsla {__version__} mode={spec.mode.value} "
            f"config_sha={spec.base_config.digest()} seed={spec.seed} trials={spec.trials}\n"
        )
        for note in notes:
            fh.write(f"# {note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _snr_config(spec: ExperimentSpec, snr_db: float) -> SystemConfig:
    return spec.base_config.with_snr(snr_db)


def run_single(spec: ExperimentSpec) -> dict:
    """Solve one realization and write a JSON report."""
    config = _snr_config(spec, spec.sweep_values[0])
    report = run_trial(config, spec.seed)
    payload = {
        "version": __version__,
        "config": config.to_dict(),
        "config_sha": config.digest(),
        "seed": spec.seed,
        "snr_db": float(spec.sweep_values[0]),
        "report": report.to_dict(),
    }
    spec.output_path.parent.mkdir(parents=True, exist_ok=True)
    spec.output_path.write_text(json.dumps(payload, indent=2))
    return payload


def run_convergence(spec: ExperimentSpec):
    """WSR versus outer iteration, one block of rows per (SNR, trial)."""
    rows = []
    for snr in spec.sweep_values:
        config = _snr_config(spec, snr)
        for t, res in enumerate(run_trials(config, spec.trials, spec.parallel_workers)):
            for it, (wsr, elapsed) in enumerate(zip(res["wsr_trajectory"], res["outer_times"]), start=1):
                rows.append((float(snr), t, it, wsr, elapsed))
    write_csv(spec.output_path, COLUMNS[Mode.CONVERGENCE], rows, spec)
    return rows


def _sweep_rows(results):
    wsr = np.array([r["final_wsr"] for r in results])
    times = np.array([r["wall_time_total"] for r in results])
    return float(wsr.mean()), float(wsr.std()), float(times.mean())


def run_sweep_n(spec: ExperimentSpec):
    """Mean final WSR and solve time for each RIS size."""
    config0 = _snr_config(spec, spec.snr_db)
    rows, notes = [], []
    for n in spec.sweep_values:
        config = config0.replace(N=int(n))
        rows.append((int(n), *_sweep_rows(run_trials(config, spec.trials, spec.parallel_workers))))
    for prev, cur in zip(rows, rows[1:]):
        if cur[1] < prev[1] - max(cur[2], prev[2]):
            msg = f"trend_violation: mean_wsr drops from N={prev[0]} to N={cur[0]} by more than 1 std"
            log.warning(msg)
            notes.append(msg)
    write_csv(spec.output_path, COLUMNS[Mode.SWEEP_N], rows, spec, notes)
    return rows


def run_sweep_snr(spec: ExperimentSpec):
    rows = []
    for snr in spec.sweep_values:
        config = _snr_config(spec, snr)
        rows.append((float(snr), *_sweep_rows(run_trials(config, spec.trials, spec.parallel_workers))))
    write_csv(spec.output_path, COLUMNS[Mode.SWEEP_SNR], rows, spec)
    return rows


@dataclass
class TimingProfile:
    n_values: list
    theta_time: list  # mean seconds per PSLA-Theta iteration
    theta_iters: list
    w_time: list  # mean seconds per PSLA-W iteration
    theta_cv: list

    @staticmethod
    def slope(n_values, times):
        return float(np.polyfit(np.log(n_values), np.log(times), 1)[0])

    @property
    def theta_slope(self):
        return self.slope(self.n_values, self.theta_time)

    @property
    def w_slope(self):
        return self.slope(self.n_values, self.w_time)


def _inner_problem(config, seed):
    channels = generate_channels(config, np.random.default_rng(seed))
    state = default_init(channels, config)
    F = effective_channels(channels, state.Theta)
    alpha = update_alpha(F, state.W, config)
    beta = update_beta(F, state.W, alpha, config)
    return channels, state, F, alpha, beta


def profile_inner_loops(config: SystemConfig, n_values, trials=3, iters=20, base_seed=0) -> TimingProfile:
    """Per-iteration wall time of both PSLA inner loops across RIS sizes.

    The inner tolerance is set negligibly small so each loop runs a fixed
    number of iterations (unless it stalls earlier).
    """
    opts = SolverOptions(eps_inner=1e-300, max_inner_iters=iters)
    theta_time, theta_iters, w_time, theta_cv = [], [], [], []
    for n in n_values:
        cfg = config.replace(N=int(n))
        per_theta, counts, per_w = [], [], []
        for t in range(trials):
            channels, state, F, alpha, beta = _inner_problem(cfg, trial_seed(base_seed, t))
            start = time.perf_counter()
            W, k_w = psla_w(F, alpha, beta, state.W, cfg, opts)
            per_w.append((time.perf_counter() - start) / max(k_w, 1))
            mats = build_surrogate_matrices(channels, W, alpha, beta, cfg)
            start = time.perf_counter()
            _, k_t = psla_theta(mats, state.Theta, opts)
            per_theta.append((time.perf_counter() - start) / max(k_t, 1))
            counts.append(k_t)
        per_theta = np.array(per_theta)
        theta_time.append(float(per_theta.mean()))
        theta_cv.append(float(per_theta.std() / per_theta.mean()))
        theta_iters.append(float(np.mean(counts)))
        w_time.append(float(np.mean(per_w)))
    return TimingProfile(list(n_values), theta_time, theta_iters, w_time, theta_cv)


def emit_timing_profile(spec: ExperimentSpec) -> TimingProfile:
    config = _snr_config(spec, spec.snr_db)
    profile = profile_inner_loops(config, [int(v) for v in spec.sweep_values], trials=spec.trials, base_seed=spec.seed)
    rows = list(zip(profile.n_values, profile.theta_time, profile.theta_iters))
    notes = [
        f"loglog_slope_theta={profile.theta_slope:.4f} loglog_slope_w={profile.w_slope:.4f}",
        "theta_time_cv=" + ",".join(f"{cv:.3f}" for cv in profile.theta_cv),
    ]
    write_csv(spec.output_path, COLUMNS[Mode.TIMING], rows, spec, notes)
    return profile


RUNNERS = {
    Mode.SINGLE: run_single,
    Mode.CONVERGENCE: run_convergence,
    Mode.SWEEP_N: run_sweep_n,
    Mode.SWEEP_SNR: run_sweep_snr,
    Mode.TIMING: emit_timing_profile,
}


def run_experiment(spec: ExperimentSpec):
    return RUNNERS[spec.mode](spec)

