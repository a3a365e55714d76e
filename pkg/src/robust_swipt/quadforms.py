"""Coupling matrices, chance-constraint event functions and realized metrics.

The event functions are the quadratic forms whose non-negativity is equivalent
to the three QoS events (IR SINR, ER leakage SINR, ER harvested power); the
realized metrics evaluate those QoS quantities directly from the perturbed
channels. Both accept either a single :class:`ErrorSample` or an
:class:`ErrorBatch` and vectorise over samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_hermitian
from .scenario import ErrorBatch, ErrorSample, Scenario, SystemConfig

PSD_REL_TOL = 1e-8


def _check_psd(A: np.ndarray, name: str):
    lam = np.linalg.eigvalsh(A)
    if lam[0] < -PSD_REL_TOL * max(float(np.trace(A).real), 1e-300):
        raise ValueError(f"{name} is not PSD (min eigenvalue {lam[0]:.3e})")


@dataclass(frozen=True, eq=False)
class BeamformerSet:
    """Information beamforming matrices ``W[i]`` and artificial-noise matrices ``V[t]``."""

    W: np.ndarray
    V: np.ndarray
    check: bool = True

    def __post_init__(self):
        W = np.array([as_hermitian(A, atol=1e-8) for A in np.asarray(self.W, dtype=complex)])
        M = W.shape[-1]
        V = np.asarray(self.V, dtype=complex)
        V = np.array([as_hermitian(A, atol=1e-8) for A in V]).reshape(-1, M, M)
        if self.check:
            for i, A in enumerate(W):
                _check_psd(A, f"W[{i}]")
            for t, A in enumerate(V):
                _check_psd(A, f"V[{t}]")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "V", V)

    @classmethod
    def from_vectors(cls, w, v) -> BeamformerSet:
        w = np.atleast_2d(np.asarray(w, dtype=complex))
        v = np.asarray(v, dtype=complex).reshape(-1, w.shape[1])
        return cls(np.einsum("im,in->imn", w, w.conj()), np.einsum("tm,tn->tmn", v, v.conj()))

    @property
    def total_power(self) -> float:
        return float(np.trace(self.W, axis1=1, axis2=2).real.sum() + np.trace(self.V, axis1=1, axis2=2).real.sum())


@dataclass(frozen=True, eq=False)
class VectorBeamformers:
    """Beamforming vectors ``w[i]`` and artificial-noise vectors ``v[t]``."""

    w: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.w, dtype=complex))
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex).reshape(-1, w.shape[1]))

    def to_matrices(self) -> BeamformerSet:
        return BeamformerSet.from_vectors(self.w, self.v)

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2) + np.sum(np.abs(self.v) ** 2))


@dataclass(frozen=True, eq=False)
class CouplingMatrices:
    """``A[i]``, ``B[i, t]`` and ``C`` of the event reformulation."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def coupling_coefficients(config: SystemConfig):
    """Linear coefficients expressing A, B, C in terms of the W's and V's.

    Returns ``(a_W, a_V, b_W, b_V)`` with ``A[i] = sum_j a_W[i, j] W[j] + sum_t a_V[i, t] V[t]``
    and ``B[i, t] = sum_j b_W[i, t, j] W[j] + sum_p b_V[i, t, p] V[p]``. C has all
    coefficients equal to one.
    """
    U, N = config.U, config.N
    a_W = -np.ones((U, U)) + np.diag(1.0 + 1.0 / config.gamma)
    a_V = -np.ones((U, N))
    b_W = np.ones((U, N, U))
    for i in range(U):
        b_W[i, :, i] -= 1.0 + 1.0 / config.gamma_leak[i, :]
    b_V = np.ones((U, N, N))
    return a_W, a_V, b_W, b_V


def build_couplings(bf: BeamformerSet, config: SystemConfig) -> CouplingMatrices:
    W, V = bf.W, bf.V
    C = W.sum(axis=0) + V.sum(axis=0)
    A = np.array([(1.0 + 1.0 / config.gamma[i]) * W[i] - C for i in range(config.U)])
    M = W.shape[-1]
    B = np.empty((config.U, config.N, M, M), dtype=complex)
    for i in range(config.U):
        for t in range(config.N):
            B[i, t] = C - (1.0 + 1.0 / config.gamma_leak[i, t]) * W[i]
    return CouplingMatrices(A, B, C)


def channel_gain(sqrt_cov, est) -> float:
    """``|est|^2 + tr(S^2)``: mean received power per unit transmit power."""
    return float(np.linalg.norm(est) ** 2 + np.linalg.norm(sqrt_cov, "fro") ** 2)


def _batch(sample) -> ErrorBatch:
    return ErrorBatch.single(sample) if isinstance(sample, ErrorSample) else sample


def _quad_event(Y, x, sqrt_cov, est, const):
    """``x^H S Y S x + 2 Re{x^H S Y est} + est^H Y est + const`` over a batch of ``x``."""
    inner = sqrt_cov @ Y @ sqrt_cov
    lin = sqrt_cov @ Y @ est
    quad = np.einsum("sm,mn,sn->s", x.conj(), inner, x).real
    cross = 2.0 * (x.conj() @ lin).real
    return quad + cross + float((est.conj() @ Y @ est).real) + const


def eval_events(cm: CouplingMatrices, scenario: Scenario, sample, config: SystemConfig | None = None):
    """Event function values ``f[S, U]``, ``k[S, U, N]``, ``d[S, N]``.

    Non-negative values signal that the SINR, leakage and harvested-power
    requirements hold for that draw. A single :class:`ErrorSample` gives arrays
    without the leading sample axis.
    """
    config = config or scenario.config
    batch = _batch(sample)
    S = len(batch)
    U, N = config.U, config.N
    f = np.empty((S, U))
    k = np.empty((S, U, N))
    d = np.empty((S, N))
    for i in range(U):
        f[:, i] = _quad_event(cm.A[i], batch.e[:, i], scenario.H_sqrt[i], scenario.h_est[i], -config.sigma2_I[i])
    for t in range(N):
        r = batch.r[:, t]
        for i in range(U):
            k[:, i, t] = _quad_event(cm.B[i, t], r, scenario.G_sqrt[t], scenario.g_est[t], config.sigma2_E[t])
        d[:, t] = _quad_event(cm.C, r, scenario.G_sqrt[t], scenario.g_est[t], -config.P_req[t])
    if isinstance(sample, ErrorSample):
        return f[0], k[0], d[0]
    return f, k, d


def perturbed_channels(scenario: Scenario, sample):
    """Actual channels ``h = h_est + H^{1/2} e`` and ``g = g_est + G^{1/2} r`` per draw."""
    batch = _batch(sample)
    h = scenario.h_est[None] + np.einsum("imn,sin->sim", scenario.H_sqrt, batch.e)
    g = scenario.g_est[None] + np.einsum("tmn,stn->stm", scenario.G_sqrt, batch.r)
    return h, g


def _received_powers(bf, ch):
    """Received power ``ch^H X ch`` of every W and V at every channel, ``[S, K, U|N]``."""
    if isinstance(bf, VectorBeamformers):
        pw = np.abs(np.einsum("skm,im->ski", ch.conj(), bf.w)) ** 2
        pv = np.abs(np.einsum("skm,tm->skt", ch.conj(), bf.v)) ** 2
    else:
        pw = np.einsum("skm,imn,skn->ski", ch.conj(), bf.W, ch).real
        pv = np.einsum("skm,tmn,skn->skt", ch.conj(), bf.V, ch).real
    return pw, pv


def eval_realized(bf, scenario: Scenario, sample, config: SystemConfig | None = None):
    """Realized IR SINRs ``[S, U]``, leakage SINRs ``[S, U, N]`` and ER powers ``[S, N]``.

    ``bf`` may be a :class:`BeamformerSet` or a :class:`VectorBeamformers`.
    """
    config = config or scenario.config
    h, g = perturbed_channels(scenario, sample)
    pw_I, pv_I = _received_powers(bf, h)  # [S, U(receiver), U], [S, U, N]
    pw_E, pv_E = _received_powers(bf, g)  # [S, N(receiver), U], [S, N, N]

    S, U, N = h.shape[0], config.U, config.N
    sig = np.empty((S, U))
    for i in range(U):
        sig[:, i] = pw_I[:, i, i]
    interference = pw_I.sum(axis=2) - sig + pv_I.sum(axis=2)
    gamma = sig / (interference + config.sigma2_I[None])

    total_E = pw_E.sum(axis=2) + pv_E.sum(axis=2)  # [S, N]
    leak = np.empty((S, U, N))
    for i in range(U):
        leak[:, i, :] = pw_E[:, :, i] / (total_E - pw_E[:, :, i] + config.sigma2_E[None])
    phi = total_E
    if isinstance(sample, ErrorSample):
        return gamma[0], leak[0], phi[0]
    return gamma, leak, phi
