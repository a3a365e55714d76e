"""Worst-case interior-point cost of the two conic formulations.

Counts follow the usual barrier-method bound: ``ln(1/eps)`` times the square
root of the total barrier parameter gives the iteration count, and each
iteration costs the Schur-complement assembly plus its factorisation, times
the number of variables ``n``. Big-O constants are fixed to one, in
particular ``n = (U + N) M^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ComplexityEstimate:
    method: int
    zeta: int
    eta: int
    n: int
    epsilon: float
    iteration_factor: float
    per_iteration_cost: float

    @property
    def total(self) -> float:
        return self.iteration_factor * self.per_iteration_cost

    def to_dict(self) -> dict:
        return {
            "method": self.method, "zeta": self.zeta, "eta": self.eta, "n": self.n,
            "epsilon": self.epsilon, "iteration_factor": self.iteration_factor,
            "per_iteration_cost": self.per_iteration_cost, "total": self.total,
        }


def _check(U: int, N: int, M: int, epsilon: float):
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if U < 1 or N < 1:
        raise DomainError("U and N must be at least 1")
    if M < 2:
        raise DomainError("M must be at least 2")


def estimate(method: int, U: int, N: int, M: int, epsilon: float) -> ComplexityEstimate:
    """Cost of an ``epsilon``-solution of the sphere-bounding (1) or Bernstein (2) program."""
    _check(U, N, M, epsilon)
    zeta = U + N
    eta = zeta + U * N
    n = zeta * M * M
    log_term = math.log(1.0 / epsilon)
    if method == 1:
        barrier = eta * (M + 1) + zeta * M
        bracket = eta * (M + 1) ** 2 * (M + 1 + n) + zeta * M * M * (M + n) + n * n
    elif method == 2:
        barrier = (zeta + eta) * M + 4 * eta
        bracket = eta * ((M * M + M + 1) ** 2 + 2 * n + 2) + (zeta + eta) * M * M * (M + n) + n * n
    else:
        raise DomainError(f"method must be 1 or 2, got {method}")
    return ComplexityEstimate(
        method=method, zeta=zeta, eta=eta, n=n, epsilon=float(epsilon),
        iteration_factor=log_term * math.sqrt(barrier),
        per_iteration_cost=float(bracket) * n,
    )
