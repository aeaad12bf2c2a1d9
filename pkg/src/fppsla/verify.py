"""Oracle suite run by ``fppsla verify``: solver components against brute force."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .fpcore import (
    build_surrogate_matrices,
    surrogate_value,
    surrogate_weights,
    theta_objective,
    update_alpha,
    update_beta,
    w_objective,
    weighted_sum_rate,
)
from .model import (
    SystemConfig,
    effective_channels,
    generate_channels,
    is_on_manifold,
    is_on_power_sphere,
    random_unit_channels,
)
from .projections import project_symmetric_unitary
from .solver import SolverOptions, psla_theta, psla_w, solve_fp_psla


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def unit_config(N, K, L, snr_db=10.0, Pt=1.0, seed=0):
    """Config matching :func:`random_unit_channels` (no path loss)."""
    return SystemConfig(L=L, N=N, K=K, Pt=Pt, noise_powers=Pt / 10 ** (snr_db / 10), rng_seed=seed)


def random_instance(N, K, L, rng, snr_db=10.0):
    """Channels, a feasible (W, Theta), the auxiliaries and surrogate matrices."""
    rng = np.random.default_rng(rng)
    config = unit_config(N, K, L, snr_db)
    channels = random_unit_channels(N, K, L, rng)
    Theta = oracle.random_feasible_theta(N, 1, rng)[0]
    W = oracle.random_sphere_points(L, K, config.Pt, 1, rng)[0]
    F = effective_channels(channels, Theta)
    alpha = update_alpha(F, W, config)
    beta = update_beta(F, W, alpha, config)
    mats = build_surrogate_matrices(channels, W, alpha, beta, config)
    return config, channels, W, Theta, F, alpha, beta, mats


def check_surrogate_tightness(trials, rng):
    worst = 0.0
    for _ in range(trials):
        config, _, W, _, F, alpha, beta, _ = random_instance(4, 3, 4, rng)
        wsr = weighted_sum_rate(F, W, config)
        worst = max(worst, abs(surrogate_value(alpha, beta, F, W, config) - wsr) / wsr)
    return CheckResult("surrogate_tightness", worst <= 1e-10, f"max relative gap {worst:.2e}")


def check_minorizer(trials, rng):
    rng = np.random.default_rng(rng)
    worst_gap, worst_eq = np.inf, 0.0
    for _ in range(trials):
        A, B = (oracle._gaussian(rng, (4, 4)) for _ in range(2))
        A, B = A @ A.conj().T, B @ B.conj().T
        T, P = (oracle._gaussian(rng, (4, 4)) for _ in range(2))
        worst_gap = min(worst_gap, oracle.minorizer_gap(A, B, T, P))
        worst_eq = max(worst_eq, abs(oracle.minorizer_gap(A, B, T, T)))
    ok = worst_gap >= -1e-9 and worst_eq <= 1e-10
    return CheckResult("quadratic_minorizer", ok, f"min gap {worst_gap:.2e}, max equality residual {worst_eq:.2e}")


def check_projection(trials, samples, rng):
    rng = np.random.default_rng(rng)
    worst = np.inf
    for _ in range(trials):
        Z = oracle._gaussian(rng, (4, 4)) * rng.uniform(0.1, 3.0)
        P = project_symmetric_unitary(Z)
        d_proj = np.linalg.norm(Z - P)
        Q = oracle.random_feasible_theta(4, samples, rng)
        worst = min(worst, float(oracle.kernels.frobenius_distance_batch(Q, Z).min() - d_proj))
    return CheckResult("projection_optimality", worst >= -1e-9, f"min (sample - projection) distance {worst:.3e}")


def check_psla_theta(trials, samples, rng):
    rng = np.random.default_rng(rng)
    worst = np.inf
    opts = SolverOptions()
    for _ in range(trials):
        *_, mats = random_instance(4, 2, 4, rng)
        Theta0 = oracle.random_feasible_theta(4, 1, rng)[0]
        Theta, _ = psla_theta(mats, Theta0, opts)
        best, _ = oracle.brute_force_theta_objective(mats, oracle.iter_feasible_theta(4, samples, rng))
        value = oracle.naive_theta_objective(Theta, mats.M, mats.X, mats.Y)
        worst = min(worst, (value - best) / abs(best))
    return CheckResult("psla_theta_dominance", worst >= -1e-3, f"min relative margin over random search {worst:.3e}")


def check_psla_w(trials, samples, rng):
    rng = np.random.default_rng(rng)
    worst = np.inf
    for _ in range(trials):
        config, _, W0, _, F, alpha, beta, _ = random_instance(4, 3, 4, rng)
        W, _ = psla_w(F, alpha, beta, W0, config, SolverOptions())
        sigma1, sigma2 = surrogate_weights(alpha, beta, config)
        best, _ = oracle.brute_force_w_objective(
            F, sigma1, sigma2, oracle.random_sphere_points(4, 3, config.Pt, samples, rng)
        )
        value = float(oracle.kernels.w_objective_batch(W[None], F, sigma1, sigma2)[0])
        worst = min(worst, (value - best) / abs(best))
    return CheckResult("psla_w_dominance", worst >= -1e-3, f"min relative margin over random search {worst:.3e}")


def check_linearization(trials, rng):
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(trials):
        *_, mats = random_instance(3, 2, 3, rng)
        Theta = oracle.random_feasible_theta(3, 1, rng)[0]
        rho = float(np.linalg.eigvalsh(mats.Y)[-1])
        f = oracle.shifted_theta_objective(mats.M, mats.X, mats.Y, rho)
        g = oracle.linearized_theta_surrogate(mats.M, mats.X, mats.Y, rho, Theta)
        D = oracle.tangent_direction(Theta, rng)
        err = oracle.finite_difference_check(f, Theta, D, 1e-5, lambda p, d: g(p + d) - g(p))
        worst = max(worst, err)
    return CheckResult("linearization_first_order", worst <= 1e-4, f"max relative slope error {worst:.2e}")


def check_solver(trials, rng):
    config = SystemConfig(L=4, N=8, K=3).with_snr(20.0)
    worst_step, infeasible, converged = np.inf, 0, 0
    for seed in range(trials):
        channels = generate_channels(config, np.random.default_rng(seed))
        report = solve_fp_psla(channels, config, SolverOptions.from_config(config, debug_checks=True))
        traj = [report.initial_wsr, *report.wsr_trajectory]
        worst_step = min(worst_step, float(np.min(np.diff(traj))))
        state = report.final_state
        infeasible += not (is_on_manifold(state.Theta) and is_on_power_sphere(state.W, config.Pt))
        converged += report.converged
    ok = worst_step >= -1e-9 and infeasible == 0
    return CheckResult(
        "solver_monotone_feasible",
        ok,
        f"min WSR step {worst_step:.2e}, infeasible {infeasible}/{trials}, converged {converged}/{trials}",
    )


def check_objective_identity(trials, rng):
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(trials):
        config, channels, W, _, _, alpha, beta, mats = random_instance(4, 3, 4, rng)
        Theta = oracle.random_feasible_theta(4, 1, rng)[0]
        F = effective_channels(channels, Theta)
        naive = oracle.naive_theta_objective(Theta, mats.M, mats.X, mats.Y)
        trace = theta_objective(Theta, mats)
        sigma1, sigma2 = surrogate_weights(alpha, beta, config)
        per_user = w_objective(W, F, sigma1, sigma2)
        worst = max(worst, abs(naive - trace), abs(per_user - trace))
    return CheckResult("objective_forms_agree", worst <= 1e-9, f"max absolute disagreement {worst:.2e}")


def run_verify(scale: float = 1.0, seed: int = 0):
    """Run every check; ``scale`` multiplies trial and sample counts."""
    n = lambda base: max(1, int(base * scale))  # noqa: E731
    rng = np.random.default_rng(seed)
    return [
        check_surrogate_tightness(n(200), rng),
        check_minorizer(n(200), rng),
        check_objective_identity(n(100), rng),
        check_projection(n(20), n(10000), rng),
        check_psla_theta(n(5), n(20000), rng),
        check_psla_w(n(5), n(20000), rng),
        check_linearization(n(20), rng),
        check_solver(n(10), rng),
    ]


