"""PSLA inner loops and the FP-PSLA alternating-optimization driver."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError
from .fpcore import (
    build_surrogate_matrices,
    surrogate_weights,
    update_alpha,
    update_beta,
    weighted_sum_rate,
)
from .model import (
    BeamformingState,
    ChannelSet,
    SystemConfig,
    effective_channels,
    is_on_manifold,
    is_on_power_sphere,
)
from .projections import project_power_sphere, project_symmetric_unitary, spectral_shift

MRT_POWER_FRACTION = 0.4
# round-off allowance when deciding whether an inner step made progress
_ROUNDOFF = 1e-13


@dataclass(frozen=True)
class SolverOptions:
    eps_outer: float = 1e-3
    eps_inner: float = 1e-4
    max_outer_iters: int = 200
    max_inner_iters: int = 100
    record_trajectory: bool = True
    debug_checks: bool = False

    def __post_init__(self):
        if not (self.eps_outer > 0 and self.eps_inner > 0):
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValueError("iteration caps must be >= 1")

    @classmethod
    def from_config(cls, config: SystemConfig, **overrides) -> "SolverOptions":
        values = dict(
            eps_outer=config.eps_outer,
            eps_inner=config.eps_inner,
            max_outer_iters=config.max_outer_iters,
            max_inner_iters=config.max_inner_iters,
        )
        values.update(overrides)
        return cls(**values)


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"


@dataclass
class SolverReport:
    wsr_trajectory: list
    inner_iters_theta: list
    inner_iters_w: list
    wall_time_total: float
    time_aux: float
    time_w: float
    time_theta: float
    termination: Termination
    final_state: BeamformingState
    initial_wsr: float
    outer_times: list = field(default_factory=list)

    @property
    def final_wsr(self) -> float:
        return self.wsr_trajectory[-1] if self.wsr_trajectory else self.initial_wsr

    @property
    def outer_iters(self) -> int:
        return len(self.inner_iters_w)

    @property
    def converged(self) -> bool:
        return self.termination is Termination.CONVERGED

    def to_dict(self) -> dict:
        return {
            "initial_wsr": self.initial_wsr,
            "final_wsr": self.final_wsr,
            "wsr_trajectory": list(self.wsr_trajectory),
            "inner_iters_theta": list(self.inner_iters_theta),
            "inner_iters_w": list(self.inner_iters_w),
            "outer_iters": self.outer_iters,
            "termination": self.termination.value,
            "wall_time_total": self.wall_time_total,
            "time_aux": self.time_aux,
            "time_w": self.time_w,
            "time_theta": self.time_theta,
        }


def _relative_change(new, old):
    return abs(new - old) / max(abs(old), abs(new), np.finfo(float).tiny)


def _no_progress(new, old):
    return new < old - _ROUNDOFF * max(abs(old), abs(new))


def psla_theta(mats, Theta0, opts: SolverOptions | None = None, history=None):
    """Maximize ``2 Re tr(Theta M) - tr(Theta X Theta^H Y)`` over symmetric unitary ``Theta``.

    Each step linearizes the shifted quadratic at the current point and
    projects the maximizer of the linear surrogate back onto the manifold.
    Returns ``(Theta, iterations)``.  If ``history`` is a list, the
    objective at ``Theta0`` and after every accepted step is appended.
    """
    opts = opts or SolverOptions()
    Theta = np.asarray(Theta0, dtype=complex)
    if not is_on_manifold(Theta):
        raise InfeasibleError("Theta0 is not symmetric unitary")
    M, X, Y = mats.M, mats.X, mats.Y
    rho = spectral_shift(Y)
    Mh = M.conj().T
    Mt = M.T

    def evaluate(T):
        TX = T @ X
        YTX = Y @ TX
        value = 2.0 * np.real(np.vdot(T.conj(), Mt)) - np.real(np.vdot(T, YTX))
        return value, TX, YTX

    value, TX, YTX = evaluate(Theta)
    if history is not None:
        history.append(value)
    iters = 0
    while iters < opts.max_inner_iters:
        candidate = project_symmetric_unitary(rho * TX - YTX + Mh)
        iters += 1
        new_value, new_TX, new_YTX = evaluate(candidate)
        if _no_progress(new_value, value):
            break
        converged = _relative_change(new_value, value) <= opts.eps_inner
        Theta, value, TX, YTX = candidate, new_value, new_TX, new_YTX
        if history is not None:
            history.append(value)
        if opts.debug_checks and not is_on_manifold(Theta):
            raise InfeasibleError(f"PSLA-Theta step {iters} left the manifold")
        if converged:
            break
    return Theta, iters


def psla_w(F, alpha, beta, W0, config, opts: SolverOptions | None = None, history=None):
    """Maximize ``2 Re tr(Sigma1 F^H W) - tr(W W^H F Sigma2 F^H)`` on the power sphere.

    Returns ``(W, iterations)``; see :func:`psla_theta` for ``history``.
    """
    opts = opts or SolverOptions()
    W = np.asarray(W0, dtype=complex)
    if not is_on_power_sphere(W, config.Pt):
        raise InfeasibleError("W0 violates the transmit power constraint")
    F = np.asarray(F)
    sigma1, sigma2 = surrogate_weights(alpha, beta, config)
    if not (np.any(sigma1) or np.any(sigma2)):
        # surrogate is constant in W
        if history is not None:
            history.append(0.0)
        return W, 0
    A = (F * sigma2[None, :]) @ F.conj().T
    A = 0.5 * (A + A.conj().T)
    rho = spectral_shift(A)
    B = F * sigma1.conj()[None, :]

    def evaluate(V):
        AV = A @ V
        value = 2.0 * np.real(np.vdot(B, V)) - np.real(np.vdot(V, AV))
        return value, AV

    value, AW = evaluate(W)
    if history is not None:
        history.append(value)
    iters = 0
    while iters < opts.max_inner_iters:
        candidate = project_power_sphere(rho * W - AW + B, config.Pt)
        iters += 1
        new_value, new_AW = evaluate(candidate)
        if _no_progress(new_value, value):
            break
        converged = _relative_change(new_value, value) <= opts.eps_inner
        W, value, AW = candidate, new_value, new_AW
        if history is not None:
            history.append(value)
        if opts.debug_checks and not is_on_power_sphere(W, config.Pt):
            raise InfeasibleError(f"PSLA-W step {iters} left the power sphere")
        if converged:
            break
    return W, iters


def rectangular_identity(rows, cols):
    return np.eye(rows, cols, dtype=complex)


def initial_theta(channels: ChannelSet) -> np.ndarray:
    """Project ``H I_{K x L} E^H`` onto the symmetric unitary manifold."""
    H, E = channels.H, channels.E
    return project_symmetric_unitary(H @ rectangular_identity(channels.K, channels.L) @ E.conj().T)


def mrt_beamformer(F, Pt: float) -> np.ndarray:
    """``sqrt(0.4 Pt) F / ||F||_F``, the (sub-budget) MRT initializer."""
    F = np.asarray(F)
    return np.sqrt(MRT_POWER_FRACTION * Pt) * F / np.linalg.norm(F)


def default_init(channels: ChannelSet, config: SystemConfig) -> BeamformingState:
    """Feasible starting point: projected rectangular-identity Theta and MRT W.

    The MRT matrix carries only 40% of the budget, so it is rescaled onto
    the power sphere.
    """
    Theta = initial_theta(channels)
    F = effective_channels(channels, Theta)
    W = project_power_sphere(mrt_beamformer(F, config.Pt), config.Pt)
    return BeamformingState(W=W, Theta=Theta)


def solve_fp_psla(
    channels: ChannelSet,
    config: SystemConfig,
    opts: SolverOptions | None = None,
    init: BeamformingState | None = None,
) -> SolverReport:
    """Run FP-PSLA until the WSR changes by at most ``eps_outer``."""
    channels.check(config)
    opts = opts or SolverOptions.from_config(config)
    if init is None:
        init = default_init(channels, config)
    init.check_feasible(config.Pt)

    start = time.perf_counter()
    W = np.array(init.W)
    Theta = np.array(init.Theta)
    F = effective_channels(channels, Theta)
    wsr = weighted_sum_rate(F, W, config)
    initial_wsr = wsr
    trajectory, iters_w, iters_theta, outer_times = [], [], [], []
    t_aux = t_w = t_theta = 0.0
    termination = Termination.MAX_ITERS

    for _ in range(opts.max_outer_iters):
        t0 = time.perf_counter()
        alpha = update_alpha(F, W, config)
        beta = update_beta(F, W, alpha, config)
        t1 = time.perf_counter()
        W, n_w = psla_w(F, alpha, beta, W, config, opts)
        t2 = time.perf_counter()
        mats = build_surrogate_matrices(channels, W, alpha, beta, config)
        Theta, n_theta = psla_theta(mats, Theta, opts)
        t3 = time.perf_counter()
        t_aux += t1 - t0
        t_w += t2 - t1
        t_theta += t3 - t2

        F = effective_channels(channels, Theta)
        previous, wsr = wsr, weighted_sum_rate(F, W, config)
        iters_w.append(n_w)
        iters_theta.append(n_theta)
        if opts.record_trajectory or not trajectory:
            trajectory.append(wsr)
        else:
            trajectory[-1] = wsr
        outer_times.append(time.perf_counter() - start)
        if opts.debug_checks:
            BeamformingState(W=W, Theta=Theta).check_feasible(config.Pt)
        if abs(wsr - previous) <= opts.eps_outer:
            termination = Termination.CONVERGED
            break

    return SolverReport(
        wsr_trajectory=trajectory,
        inner_iters_theta=iters_theta,
        inner_iters_w=iters_w,
        wall_time_total=time.perf_counter() - start,
        time_aux=t_aux,
        time_w=t_w,
        time_theta=t_theta,
        termination=termination,
        final_state=BeamformingState(W=W, Theta=Theta),
        initial_wsr=initial_wsr,
        outer_times=outer_times,
    )
