"""System configuration, channel scenarios and CSI-error sampling.

All quantities are linear (watts, linear SINR). Conversions from the dB/dBm
values used in configuration files happen in :meth:`SystemConfig.from_db`.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainError
from .linalg import as_hermitian, herm_sqrt

SPEED_OF_LIGHT = 3e8
SAMPLE_CHUNK = 256


def db_to_linear(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def dbm_to_watts(x):
    return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float)) + 30.0


def _broadcast(value, shape, name):
    arr = np.asarray(value, dtype=float)
    try:
        return np.array(np.broadcast_to(arr, shape), dtype=float)
    except ValueError:
        raise ConfigError(f"{name}: cannot broadcast shape {arr.shape} to {shape}") from None


@dataclass(frozen=True)
class SystemConfig:
    """QoS targets, outage tolerances, dimensions and noise powers (linear units).

    ``gamma_leak``, ``rho_leak`` are indexed ``[i, t]`` (IR, ER).
    """

    M: int
    U: int
    N: int
    sigma2_I: np.ndarray
    sigma2_E: np.ndarray
    gamma: np.ndarray
    gamma_leak: np.ndarray
    P_req: np.ndarray
    rho: np.ndarray
    rho_leak: np.ndarray
    varrho: np.ndarray

    def __post_init__(self):
        M, U, N = self.M, self.U, self.N
        if int(M) != M or M < 2:
            raise ConfigError(f"M must be an integer > 1, got {M}")
        if int(U) != U or U < 1:
            raise ConfigError(f"U must be a positive integer, got {U}")
        if int(N) != N or N < 0:
            raise ConfigError(f"N must be a non-negative integer, got {N}")
        shapes = {
            "sigma2_I": (U,), "sigma2_E": (N,), "gamma": (U,), "gamma_leak": (U, N),
            "P_req": (N,), "rho": (U,), "rho_leak": (U, N), "varrho": (N,),
        }
        for name, shape in shapes.items():
            arr = _broadcast(getattr(self, name), shape, name)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("sigma2_I", "sigma2_E", "gamma", "gamma_leak", "P_req"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ConfigError(f"{name} must be positive")
        for name in ("rho", "rho_leak", "varrho"):
            arr = getattr(self, name)
            if np.any(arr <= 0) or np.any(arr > 1):
                raise ConfigError(f"{name} must lie in (0, 1]")

    @classmethod
    def from_db(
        cls, M, U, N, *, gamma_dB, gamma_leak_dB, P_req_dBm, noise_I_dBm=-70.0,
        noise_E_dBm=-70.0, rho=0.1, rho_leak=0.1, varrho=0.1,
    ) -> SystemConfig:
        return cls(
            M=int(M), U=int(U), N=int(N),
            sigma2_I=dbm_to_watts(noise_I_dBm), sigma2_E=dbm_to_watts(noise_E_dBm),
            gamma=db_to_linear(gamma_dB), gamma_leak=db_to_linear(gamma_leak_dB),
            P_req=dbm_to_watts(P_req_dBm), rho=rho, rho_leak=rho_leak, varrho=varrho,
        )

    def replace(self, **changes) -> SystemConfig:
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return SystemConfig(**values)


@dataclass(frozen=True)
class Geometry:
    """Large-scale propagation parameters of the simulation setup."""

    l_I: float | Sequence[float] = 100.0
    l_E: float | Sequence[float] = 9.0
    fc: float = 900e6
    kappa: float = 2.7


def path_gain(l, fc: float, kappa: float):
    """Free-space style amplitude gain ``c/(4 pi fc) * l**(-kappa/2)``."""
    l = np.asarray(l, dtype=float)
    if np.any(l <= 0):
        raise DomainError("distance must be positive")
    if fc <= 0:
        raise DomainError("carrier frequency must be positive")
    g = SPEED_OF_LIGHT / (4.0 * np.pi * fc) * l ** (-kappa / 2.0)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True, eq=False)
class Scenario:
    """Estimated channels and error covariances for one channel realization.

    Row ``i`` of ``h_est`` is the estimated IR channel; ``H_cov[i]`` its error
    covariance. Likewise ``g_est``/``G_cov`` for the ERs.
    """

    config: SystemConfig
    h_est: np.ndarray
    g_est: np.ndarray
    H_cov: np.ndarray
    G_cov: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = self.config
        h = np.asarray(self.h_est, dtype=complex).reshape(c.U, c.M)
        g = np.asarray(self.g_est, dtype=complex).reshape(c.N, c.M)
        Hc = np.array([as_hermitian(A, atol=1e-9) for A in np.asarray(self.H_cov, dtype=complex).reshape(c.U, c.M, c.M)])
        Gc = np.array([as_hermitian(A, atol=1e-9) for A in np.asarray(self.G_cov, dtype=complex).reshape(c.N, c.M, c.M)])
        Gc = Gc.reshape(c.N, c.M, c.M)
        for arr in (h, g, Hc, Gc):
            arr.setflags(write=False)
        object.__setattr__(self, "h_est", h)
        object.__setattr__(self, "g_est", g)
        object.__setattr__(self, "H_cov", Hc)
        object.__setattr__(self, "G_cov", Gc)
        # validates PSD-ness eagerly
        _ = self.H_sqrt, self.G_sqrt

    @cached_property
    def H_sqrt(self) -> np.ndarray:
        out = np.array([herm_sqrt(A) for A in self.H_cov]).reshape(self.H_cov.shape)
        out.setflags(write=False)
        return out

    @cached_property
    def G_sqrt(self) -> np.ndarray:
        out = np.array([herm_sqrt(A) for A in self.G_cov]).reshape(self.G_cov.shape)
        out.setflags(write=False)
        return out

    def with_config(self, config: SystemConfig) -> Scenario:
        return Scenario(config, self.h_est, self.g_est, self.H_cov, self.G_cov, self.seed, dict(self.meta))

    def perfect_csi(self) -> Scenario:
        """Copy with every error covariance set to zero."""
        return Scenario(
            self.config, self.h_est, self.g_est, np.zeros_like(self.H_cov),
            np.zeros_like(self.G_cov), self.seed, dict(self.meta),
        )


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def generate_scenario(
    config: SystemConfig, seed: int, epsilon: float = 1e-3, geometry: Geometry | None = None,
) -> Scenario:
    """Draw estimated channels ``gain * CN(0, I)`` and covariances ``epsilon * gain**2 * I``."""
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    geometry = geometry or Geometry()
    M, U, N = config.M, config.U, config.N
    gain_I = np.broadcast_to(path_gain(geometry.l_I, geometry.fc, geometry.kappa), (U,))
    gain_E = np.broadcast_to(path_gain(geometry.l_E, geometry.fc, geometry.kappa), (N,))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5C3]))
    h_w = _complex_normal(rng, (U, M))
    g_w = _complex_normal(rng, (N, M))
    eye = np.eye(M)
    return Scenario(
        config=config,
        h_est=gain_I[:, None] * h_w,
        g_est=gain_E[:, None] * g_w,
        H_cov=np.array([epsilon * gI**2 * eye for gI in gain_I]).reshape(U, M, M),
        G_cov=np.array([epsilon * gE**2 * eye for gE in gain_E]).reshape(N, M, M),
        seed=int(seed),
        meta={"epsilon": float(epsilon), "geometry": geometry},
    )


@dataclass(frozen=True)
class ErrorSample:
    """Unit-covariance error vectors for one draw: ``e[i]`` (IRs), ``r[t]`` (ERs)."""

    e: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class ErrorBatch(Sequence):
    """A batch of error samples stored as stacked arrays ``e[S, U, M]``, ``r[S, N, M]``."""

    e: np.ndarray
    r: np.ndarray

    def __len__(self):
        return self.e.shape[0]

    def __getitem__(self, k):
        if isinstance(k, slice):
            return ErrorBatch(self.e[k], self.r[k])
        return ErrorSample(self.e[k], self.r[k])

    @classmethod
    def single(cls, sample: ErrorSample) -> ErrorBatch:
        return cls(np.asarray(sample.e, dtype=complex)[None], np.asarray(sample.r, dtype=complex)[None])

    @classmethod
    def zeros(cls, config: SystemConfig, count: int = 1) -> ErrorBatch:
        return cls(np.zeros((count, config.U, config.M), complex), np.zeros((count, config.N, config.M), complex))


def _chunk(seed: int, index: int, U: int, N: int, M: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(index), 0xE77]))
    return _complex_normal(rng, (SAMPLE_CHUNK, U + N, M))


def draw_errors(scenario: Scenario, count: int, seed: int, start: int = 0) -> ErrorBatch:
    """Samples ``start .. start+count-1`` of the CN(0, I) error stream for ``seed``.

    Sample ``k`` depends only on ``(seed, k)`` and the dimensions, so batches can
    be drawn in any order or in parallel.
    """
    c = scenario.config
    if count < 0:
        raise DomainError("count must be non-negative")
    out = np.empty((count, c.U + c.N, c.M), dtype=complex)
    k = 0
    while k < count:
        idx = start + k
        chunk, pos = divmod(idx, SAMPLE_CHUNK)
        take = min(SAMPLE_CHUNK - pos, count - k)
        out[k:k + take] = _chunk(seed, chunk, c.U, c.N, c.M)[pos:pos + take]
        k += take
    return ErrorBatch(out[:, :c.U], out[:, c.U:])
