"""Domain types, channel generation and configuration I/O."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np

from .errors import ConfigError, DimensionError, InfeasibleError

POWER_RTOL = 1e-10
MANIFOLD_TOL = 1e-8


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def pathloss(distance: float, ref_db: float, exponent: float) -> float:
    """Linear large-scale gain ``L0 * d**(-exponent)`` with ``L0`` given in dB."""
    return db_to_linear(ref_db) * float(distance) ** (-exponent)


def _as_tuple(value, length, name, cast=float):
    if np.isscalar(value):
        return tuple(cast(value) for _ in range(length))
    out = tuple(cast(v) for v in value)
    if len(out) != length:
        raise ConfigError(name, f"expected {length} entries, got {len(out)}")
    return out


def _point(value, name):
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(name, "expected a 2-D coordinate [x, y]") from None
    return (x, y)


@dataclass(frozen=True)
class SystemConfig:
    L: int = 32
    N: int = 16
    K: int = 32
    Pt: float = 1.0
    noise_powers: tuple = ()
    weights: tuple = ()
    bs_position: tuple = (0.0, 0.0)
    ris_position: tuple = (150.0, 50.0)
    user_area_center: tuple = (150.0, 0.0)
    user_area_diameter: float = 20.0
    pathloss_ref_db: float = -30.0
    pathloss_exp_bs_ris: float = 2.0
    pathloss_exp_ris_user: float = 2.2
    eps_outer: float = 1e-3
    eps_inner: float = 1e-4
    max_outer_iters: int = 200
    max_inner_iters: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        set_ = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        for name in ("L", "N", "K", "max_outer_iters", "max_inner_iters"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigError(name, f"must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(name, f"must be >= 1, got {value}")
            set_(name, int(value))
        if not self.Pt > 0 or not math.isfinite(self.Pt):
            raise ConfigError("Pt", f"must be a finite positive power, got {self.Pt}")
        set_("Pt", float(self.Pt))
        if not np.isscalar(self.weights) and len(self.weights) == 0:
            set_("weights", 1.0)
        set_("weights", _as_tuple(self.weights, self.K, "weights"))
        if not all(w > 0 for w in self.weights):
            raise ConfigError("weights", "all weights must be > 0")
        for name in ("bs_position", "ris_position", "user_area_center"):
            set_(name, _point(getattr(self, name), name))
        if not self.user_area_diameter >= 0:
            raise ConfigError("user_area_diameter", "must be >= 0")
        if self.noise_powers is None or (not np.isscalar(self.noise_powers) and len(self.noise_powers) == 0):
            set_("noise_powers", default_noise_powers(self, snr_db=20.0))
        set_("noise_powers", _as_tuple(self.noise_powers, self.K, "noise_powers"))
        if not all(s > 0 and math.isfinite(s) for s in self.noise_powers):
            raise ConfigError("noise_powers", "all noise powers must be finite and > 0")
        for name in ("eps_outer", "eps_inner"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, f"must be > 0, got {getattr(self, name)}")
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise ConfigError("rng_seed", "must be an unsigned integer")
        set_("rng_seed", int(self.rng_seed))

    def replace(self, **changes) -> "SystemConfig":
        """Return a copy with ``changes`` applied.

        Changing ``K`` without new per-user lists re-broadcasts the first
        noise power and weight.
        """
        if "K" in changes and changes["K"] != self.K:
            changes.setdefault("noise_powers", self.noise_powers[0])
            changes.setdefault("weights", self.weights[0])
        return dataclasses.replace(self, **changes)

    def with_snr(self, snr_db: float, reference: str = "cascaded") -> "SystemConfig":
        return self.replace(noise_powers=default_noise_powers(self, snr_db, reference))

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def bs_ris_distance(self) -> float:
        return math.dist(self.bs_position, self.ris_position)


def default_noise_powers(config, snr_db: float, reference: str = "cascaded") -> float:
    """Noise power giving the requested SNR.

    ``reference="transmit"`` is the plain ``Pt / sigma^2`` ratio.
    ``reference="cascaded"`` (the default) also folds in the BS-RIS-user
    large-scale gain at the centre of the user area, so that the SNR is the
    per-path receive SNR before any array or beamforming gain.
    """
    ratio = db_to_linear(snr_db)
    if reference == "transmit":
        return config.Pt / ratio
    if reference != "cascaded":
        raise ConfigError("snr_reference", f"unknown reference {reference!r}")
    gain = pathloss(
        math.dist(config.bs_position, config.ris_position),
        config.pathloss_ref_db,
        config.pathloss_exp_bs_ris,
    ) * pathloss(
        max(math.dist(config.ris_position, config.user_area_center), 1e-9),
        config.pathloss_ref_db,
        config.pathloss_exp_ris_user,
    )
    return config.Pt * gain / ratio


def default_config() -> SystemConfig:
    """Simulation setup of the reference scenario (N = 16, SNR 20 dB)."""
    return SystemConfig()


_CONVENIENCE_KEYS = {"snr_db", "snr_reference"}


def config_from_dict(data: dict, base: SystemConfig | None = None) -> SystemConfig:
    """Build a config from a flat mapping; unknown keys are rejected.

    Missing keys fall back to ``base`` (default: :func:`default_config`).
    ``snr_db`` may be given instead of ``noise_powers``.
    """
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {f.name for f in dataclasses.fields(SystemConfig)}
    unknown = sorted(set(data) - known - _CONVENIENCE_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    data = dict(data)
    snr_db = data.pop("snr_db", None)
    reference = data.pop("snr_reference", "cascaded")
    if snr_db is not None and "noise_powers" in data:
        raise ConfigError("snr_db", "give either snr_db or noise_powers, not both")
    base = base or default_config()
    try:
        config = base.replace(**data)
    except TypeError as exc:
        raise ConfigError("<root>", str(exc)) from None
    if snr_db is not None:
        config = config.with_snr(float(snr_db), reference)
    elif "noise_powers" not in data:
        config = config.with_snr(20.0, reference)
    return config


def load_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("path", f"cannot read config file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("path", f"cannot parse {path}: {exc}") from None
    return config_from_dict(data)


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChannelSet:
    """RIS-to-users channels ``H`` (N x K) and BS-to-RIS channel ``E`` (N x L)."""

    H: np.ndarray
    E: np.ndarray
    user_positions: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        H = _frozen(np.atleast_2d(self.H))
        E = _frozen(np.atleast_2d(self.E))
        if H.ndim != 2 or E.ndim != 2 or H.shape[0] != E.shape[0]:
            raise DimensionError(f"H {H.shape} and E {E.shape} must share the RIS dimension")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(E))):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "E", E)

    @property
    def N(self):
        return self.H.shape[0]

    @property
    def K(self):
        return self.H.shape[1]

    @property
    def L(self):
        return self.E.shape[1]

    def check(self, config: SystemConfig):
        if (self.N, self.K, self.L) != (config.N, config.K, config.L):
            raise DimensionError(
                f"channels have (N, K, L) = {(self.N, self.K, self.L)}, "
                f"config expects {(config.N, config.K, config.L)}"
            )


def manifold_residuals(Theta):
    """Return ``(||Theta - Theta^T||_F, ||Theta Theta^H - I||_F)``."""
    Theta = np.asarray(Theta)
    n = Theta.shape[0]
    sym = np.linalg.norm(Theta - Theta.T)
    uni = np.linalg.norm(Theta @ Theta.conj().T - np.eye(n))
    return float(sym), float(uni)


def is_on_manifold(Theta, tol=MANIFOLD_TOL) -> bool:
    Theta = np.asarray(Theta)
    if Theta.ndim != 2 or Theta.shape[0] != Theta.shape[1]:
        return False
    sym, uni = manifold_residuals(Theta)
    return sym <= tol and uni <= tol


def is_on_power_sphere(W, Pt, rtol=POWER_RTOL) -> bool:
    power = np.linalg.norm(W) ** 2
    return abs(power - Pt) <= rtol * Pt


@dataclass(frozen=True)
class BeamformingState:
    W: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "W", _frozen(self.W))
        object.__setattr__(self, "Theta", _frozen(self.Theta))

    def check_feasible(self, Pt: float):
        if not is_on_power_sphere(self.W, Pt):
            power = np.linalg.norm(self.W) ** 2
            raise InfeasibleError(f"||W||_F^2 = {power:.6g} differs from Pt = {Pt:.6g}")
        if not is_on_manifold(self.Theta):
            sym, uni = manifold_residuals(self.Theta)
            raise InfeasibleError(
                f"Theta is not symmetric unitary (asymmetry {sym:.2e}, unitarity error {uni:.2e})"
            )


@dataclass(frozen=True)
class AuxiliaryVars:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = _frozen(self.alpha, dtype=float)
        if np.any(alpha < 0):
            raise ValueError("alpha must be non-negative")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", _frozen(self.beta))


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_user_positions(config: SystemConfig, rng) -> np.ndarray:
    """Uniform draws in the user disk, shape (K, 2)."""
    radius = 0.5 * config.user_area_diameter * np.sqrt(rng.random(config.K))
    angle = 2.0 * np.pi * rng.random(config.K)
    cx, cy = config.user_area_center
    return np.column_stack([cx + radius * np.cos(angle), cy + radius * np.sin(angle)])


def generate_channels(config: SystemConfig, rng=None) -> ChannelSet:
    """Rayleigh-faded channels scaled by distance-based path loss.

    ``rng`` may be a ``numpy.random.Generator`` or an integer seed; it
    defaults to ``config.rng_seed``.
    """
    if rng is None:
        rng = config.rng_seed
    rng = np.random.default_rng(rng)
    users = sample_user_positions(config, rng)
    g_bs = pathloss(config.bs_ris_distance, config.pathloss_ref_db, config.pathloss_exp_bs_ris)
    E = np.sqrt(g_bs) * _complex_gaussian(rng, (config.N, config.L))
    d_users = np.hypot(users[:, 0] - config.ris_position[0], users[:, 1] - config.ris_position[1])
    # users exactly on the RIS would give infinite gain
    d_users = np.maximum(d_users, 1e-3)
    g_users = np.array(
        [pathloss(d, config.pathloss_ref_db, config.pathloss_exp_ris_user) for d in d_users]
    )
    H = _complex_gaussian(rng, (config.N, config.K)) * np.sqrt(g_users)[None, :]
    return ChannelSet(H=H, E=E, user_positions=users)


def effective_channels(channels: ChannelSet, Theta) -> np.ndarray:
    """Effective BS-to-user channels ``F`` (L x K) with ``F^H = H^H Theta E``."""
    Theta = np.asarray(Theta)
    if Theta.shape != (channels.N, channels.N):
        raise DimensionError(f"Theta has shape {Theta.shape}, expected {(channels.N, channels.N)}")
    return (channels.H.conj().T @ Theta @ channels.E).conj().T


def random_unit_channels(N, K, L, rng) -> ChannelSet:
    """Unit-variance i.i.d. Rayleigh channels without path loss (testing aid)."""
    rng = np.random.default_rng(rng)
    return ChannelSet(H=_complex_gaussian(rng, (N, K)), E=_complex_gaussian(rng, (N, L)))
