"""Hermitian matrix helpers and the chi-square quantile used for sphere radii.

Hermitian matrices and complex vectors are plain ``numpy`` arrays of dtype
``complex128``. Every spectral quantity goes through :func:`eigh`.
"""
from __future__ import annotations

import numpy as np
from scipy import optimize, special

from .errors import DomainError, NotPSD

PSD_FLOOR = 1e-10


def as_hermitian(A, *, atol: float = 1e-12) -> np.ndarray:
    """Return ``A`` as a complex square array, symmetrised to exact Hermitian form.

    Raises ``ValueError`` when ``A`` is not square or deviates from its
    conjugate transpose by more than ``atol * max(1, |A|)``.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > atol * scale:
        raise ValueError("matrix is not Hermitian")
    H = 0.5 * (A + A.conj().T)
    np.fill_diagonal(H, H.diagonal().real)
    return H


def eigh(A) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    return np.linalg.eigh(as_hermitian(A, atol=1e-8))


def herm_sqrt(A) -> np.ndarray:
    """Positive semidefinite square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-1e-10 * max(lmax, 1), 0)`` are clamped to zero; anything
    more negative raises :class:`NotPSD`.
    """
    lam, Q = eigh(A)
    floor = -PSD_FLOOR * max(float(lam[-1]), 1.0)
    if lam[0] < floor:
        raise NotPSD(f"minimum eigenvalue {lam[0]:.3e} below floor {floor:.3e}")
    root = np.sqrt(np.clip(lam, 0.0, None))
    S = (Q * root) @ Q.conj().T
    return as_hermitian(S, atol=1e-8)


def embed_real(A) -> np.ndarray:
    """Real symmetric embedding ``[[Re A, -Im A], [Im A, Re A]]`` of a Hermitian matrix."""
    A = np.asarray(A, dtype=complex)
    re, im = A.real, A.imag
    return np.block([[re, -im], [im, re]])


def unembed_real(X: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_real` (averages the two redundant copies)."""
    n = X.shape[0] // 2
    re = 0.5 * (X[:n, :n] + X[n:, n:])
    im = 0.5 * (X[n:, :n] - X[:n, n:])
    return re + 1j * im


def s_plus(A) -> float:
    """``max(lambda_max(A), 0)``."""
    return max(float(eigh(A)[0][-1]), 0.0)


def lambda_max(A) -> float:
    return float(eigh(A)[0][-1])


def chi2_cdf(m: int, x: float) -> float:
    """Chi-square CDF with ``m`` degrees of freedom."""
    if x <= 0:
        return 0.0
    return float(special.gammainc(m / 2.0, x / 2.0))


def _chi2_pdf(m: int, x: float) -> float:
    k = m / 2.0
    return float(np.exp((k - 1) * np.log(x) - x / 2.0 - k * np.log(2.0) - special.gammaln(k)))


def chi2_inv_cdf(m: int, p: float) -> float:
    """Inverse chi-square CDF by bracketed root finding with a Newton polish.

    The returned ``x`` satisfies ``chi2_cdf(m, x) == p`` to about 1e-12.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {m}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    m = int(m)

    hi = max(1.0, float(m))
    while chi2_cdf(m, hi) < p:
        hi *= 2.0
    lo = 0.0
    x = optimize.brentq(lambda t: chi2_cdf(m, t) - p, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    for _ in range(3):
        pdf = _chi2_pdf(m, x)
        if pdf <= 0 or not np.isfinite(pdf):
            break
        step = (chi2_cdf(m, x) - p) / pdf
        if not np.isfinite(step) or abs(step) > 1e-3 * max(x, 1e-300):
            break
        x -= step
    return float(x)
