"""Acceptance gate: ten end-to-end criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (visible even under output
capture) and then asserts.  Run standalone with
``python3 -m tests.test_acceptance`` for just the summary lines.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest

from fppsla import kernels, oracle
from fppsla.fpcore import surrogate_value, theta_objective, weighted_sum_rate
from fppsla.harness import profile_inner_loops, run_trial, run_trials
from fppsla.model import SystemConfig, default_config, generate_channels, manifold_residuals
from fppsla.solver import SolverOptions, psla_theta
from fppsla.verify import random_instance

pytestmark = pytest.mark.slow

SMALL = SystemConfig(L=4, N=8, K=3).with_snr(20.0)
SEEDS = range(100)


def report(number, name, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} [{number:2d}] {name}: {detail}"
    print(line, flush=True)
    return line


@pytest.fixture
def emit(capsys):
    def _emit(*args):
        with capsys.disabled():
            print()
            report(*args)

    return _emit


@lru_cache(maxsize=1)
def small_solves():
    start = time.perf_counter()
    reports = [run_trial(SMALL, seed) for seed in SEEDS]
    return reports, time.perf_counter() - start


def criterion_feasibility():
    reports, elapsed = small_solves()
    worst_sym = worst_unit = worst_power = 0.0
    for rep in reports:
        sym, unit = manifold_residuals(rep.final_state.Theta)
        power = np.linalg.norm(rep.final_state.W) ** 2
        worst_sym = max(worst_sym, sym)
        worst_unit = max(worst_unit, unit)
        worst_power = max(worst_power, abs(power - SMALL.Pt) / SMALL.Pt)
    ok = worst_sym <= 1e-8 and worst_unit <= 1e-8 and worst_power <= 1e-10 and elapsed < 30
    detail = (
        f"max |T-T^T|={worst_sym:.1e} max |TT^H-I|={worst_unit:.1e} "
        f"max power rel err={worst_power:.1e} runtime={elapsed:.1f}s"
    )
    return 1, "feasibility (4,8,3) x100", ok, detail


def criterion_monotone():
    reports, _ = small_solves()
    worst_step = np.inf
    converged = 0
    for rep in reports:
        traj = np.array([rep.initial_wsr, *rep.wsr_trajectory])
        worst_step = min(worst_step, float(np.diff(traj).min()))
        converged += rep.converged
    ok = worst_step >= -1e-9 and converged >= 95
    return 2, "monotone WSR and eps termination", ok, f"min step={worst_step:.2e} converged={converged}/100"


def criterion_surrogate_tight():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        config, _, W, _, F, alpha, beta, _ = random_instance(4, 3, 4, rng)
        wsr = weighted_sum_rate(F, W, config)
        worst = max(worst, abs(surrogate_value(alpha, beta, F, W, config) - wsr) / wsr)
    return 3, "FP surrogate equals WSR at optimal aux", worst <= 1e-10, f"max rel gap={worst:.2e} over 1000"


def criterion_minorizer():
    rng = np.random.default_rng(4)
    worst_gap, worst_eq = np.inf, 0.0
    for _ in range(1000):
        A, B, T, P = (oracle._gaussian(rng, (4, 4)) for _ in range(4))
        A, B = A @ A.conj().T, B @ B.conj().T
        worst_gap = min(worst_gap, oracle.minorizer_gap(A, B, T, P))
        worst_eq = max(worst_eq, abs(oracle.minorizer_gap(A, B, T, T)))
    ok = worst_gap >= -1e-9 and worst_eq <= 1e-10
    return 4, "quadratic minorizer", ok, f"min gap={worst_gap:.2e} max equality residual={worst_eq:.2e}"


def criterion_projection():
    rng = np.random.default_rng(5)
    from fppsla.projections import project_symmetric_unitary

    start = time.perf_counter()
    worst = np.inf
    for _ in range(1000):
        Z = oracle._gaussian(rng, (4, 4))
        d_proj = np.linalg.norm(Z - project_symmetric_unitary(Z))
        d_samples = kernels.frobenius_distance_batch(oracle.random_feasible_theta(4, 10_000, rng), Z)
        worst = min(worst, float(d_samples.min() - d_proj))
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-9 and elapsed < 300
    return 5, "projection optimality 1000 Z x 1e4 Q", ok, f"min margin={worst:.3e} runtime={elapsed:.1f}s"


def criterion_inner_dominance():
    rng = np.random.default_rng(6)
    worst = np.inf
    for _ in range(100):
        *_, mats = random_instance(4, 3, 4, rng)
        Theta, _ = psla_theta(mats, oracle.random_feasible_theta(4, 1, rng)[0])
        value = theta_objective(Theta, mats)
        best, _ = oracle.brute_force_theta_objective(mats, oracle.iter_feasible_theta(4, 100_000, rng))
        worst = min(worst, (value - best) / abs(best))
    return 6, "psla_theta vs 1e5 random samples", worst >= -1e-3, f"min rel margin={worst:.3e} over 100"


def criterion_single_user():
    base = default_config().replace(L=4, K=1)
    # the bound must first be shown achievable by search at N = 3
    cfg3 = base.replace(N=3).with_snr(20.0)
    ch3 = generate_channels(cfg3, 0)
    gain, _ = oracle.search_single_user_gain(ch3, 1_000_000, 0)
    bound3 = oracle.single_user_bound(ch3, cfg3)
    rate3 = math.log2(1 + cfg3.Pt * gain / cfg3.noise_powers[0])
    gain_bound = (2**bound3 - 1) * cfg3.noise_powers[0] / cfg3.Pt
    achievable = rate3 >= 0.995 * bound3 and gain >= 0.995 * gain_bound

    cfg8 = base.replace(N=8).with_snr(20.0)
    ratios = []
    for seed in range(50):
        ch = generate_channels(cfg8, seed)
        rep = run_trial(cfg8, seed)
        ratios.append(rep.final_wsr / oracle.single_user_bound(ch, cfg8))
    ratios = np.array(ratios)
    within = int(np.sum(ratios >= 0.99))
    ok = achievable and within == 50
    detail = (
        f"N=3 search reaches {rate3 / bound3:.5f} of bound (gain {gain / gain_bound:.5f}); "
        f"N=8: {within}/50 within 1%, min ratio={ratios.min():.4f}"
    )
    return 7, "single-user bound", ok, detail


def criterion_default_convergence():
    config = default_config()
    start = time.perf_counter()
    reports = [run_trial(config, seed) for seed in range(20)]
    elapsed = time.perf_counter() - start
    fast = sum(r.converged and r.outer_iters <= 100 for r in reports)
    iters = [r.outer_iters for r in reports]
    ok = fast >= 19 and elapsed < 600
    detail = f"{fast}/20 converge within 100 outer iters (median iters {int(np.median(iters))}) runtime={elapsed:.1f}s"
    return 8, "default config convergence speed", ok, detail


def criterion_scaling():
    profile = profile_inner_loops(default_config(), [16, 32, 64, 128, 256], trials=3, iters=20)
    slope = profile.theta_slope
    times = " ".join(f"{n}:{t * 1e3:.2f}ms" for n, t in zip(profile.n_values, profile.theta_time))
    return 9, "theta-update time scaling", 2.5 <= slope <= 3.5, f"log-log slope={slope:.3f} ({times})"


def criterion_determinism():
    config = SMALL
    a = run_trials(config, 6, workers=1)
    b = run_trials(config, 6, workers=1)
    c = run_trials(config, 6, workers=2)
    same = all(x["wsr_trajectory"] == y["wsr_trajectory"] == z["wsr_trajectory"] for x, y, z in zip(a, b, c))
    return 10, "determinism serial and parallel", same, f"{len(a)} trials bitwise identical={same}"


CRITERIA = [
    criterion_feasibility,
    criterion_monotone,
    criterion_surrogate_tight,
    criterion_minorizer,
    criterion_projection,
    criterion_inner_dominance,
    criterion_single_user,
    criterion_default_convergence,
    criterion_scaling,
    criterion_determinism,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__.removeprefix("criterion_") for c in CRITERIA])
def test_acceptance(criterion, emit):
    result = criterion()
    emit(*result)
    assert result[2], result[3]


if __name__ == "__main__":
    failures = 0
    for criterion in CRITERIA:
        result = criterion()
        report(*result)
        failures += not result[2]
    raise SystemExit(1 if failures else 0)
