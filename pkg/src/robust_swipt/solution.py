"""Design entry points, rank-one extraction and Monte-Carlo outage validation."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import assembly
from .benchmark import assemble_perfect_csi
from .bernstein import LMI, NATIVE_SOC, assemble_method2
from .conic.problem import ConicProblem
from .conic.solver import DEFAULT_TOL, SolveResult, Status, solve
from .errors import NotRankOne
from .quadforms import BeamformerSet, VectorBeamformers, build_couplings, eval_events
from .scenario import Scenario, SystemConfig, draw_errors
from .sprocedure import assemble_method1

RANK_RATIO_TOL = 1e-5
# matrices whose top eigenvalue is below this fraction of the total power count as zero
ZERO_REL_TOL = 1e-7
VALIDATION_CHUNK = 4096


class Method(str, enum.Enum):
    METHOD1 = "Method1"
    METHOD2_SOC = "Method2-soc"
    METHOD2_LMI = "Method2-lmi"
    BASELINE = "Baseline"
    BENCHMARK = "Benchmark"

    @classmethod
    def parse(cls, value) -> Method:
        if isinstance(value, Method):
            return value
        aliases = {"1": cls.METHOD1, "method1": cls.METHOD1, "2": cls.METHOD2_SOC, "method2": cls.METHOD2_SOC,
                   "method2-soc": cls.METHOD2_SOC, "method2-lmi": cls.METHOD2_LMI,
                   "baseline": cls.BASELINE, "benchmark": cls.BENCHMARK}
        key = str(value).strip().lower()
        if key not in aliases:
            raise ValueError(f"unknown method {value!r}; expected one of {[m.value for m in cls]}")
        return aliases[key]


def check_rank_one(A, ratio_tol: float = RANK_RATIO_TOL) -> tuple[bool, float]:
    """``(lambda_2 / lambda_1 <= ratio_tol, lambda_2 / lambda_1)``.

    A matrix without a positive eigenvalue gives ``(False, nan)``; callers
    decide separately whether it counts as a zero matrix.
    """
    lam = np.linalg.eigvalsh(np.asarray(A, dtype=complex))
    if lam[-1] <= 0.0:
        return False, float("nan")
    ratio = float(max(lam[-2], 0.0) / lam[-1]) if lam.size > 1 else 0.0
    return ratio <= ratio_tol, ratio


def extract(A, ratio_tol: float = RANK_RATIO_TOL) -> np.ndarray:
    """Vector ``x`` with ``x x^H`` equal to the rank-one matrix ``A``.

    The global phase is fixed so that the largest-magnitude entry is real and
    non-negative. The zero matrix maps to the zero vector.
    """
    A = np.asarray(A, dtype=complex)
    lam, Z = np.linalg.eigh(A)
    if lam[-1] <= 0.0:
        return np.zeros(A.shape[0], dtype=complex)
    ok, ratio = check_rank_one(A, ratio_tol)
    if not ok:
        raise NotRankOne(f"eigenvalue ratio {ratio:.3e} exceeds {ratio_tol:.1e}")
    z = Z[:, -1]
    k = int(np.argmax(np.abs(z)))
    z = z * np.exp(-1j * np.angle(z[k]))
    z[k] = abs(z[k])
    return np.sqrt(lam[-1]) * z


@dataclass
class BeamformingSolution:
    """Outcome of one design call.

    ``W``/``V`` hold the solver's matrices and ``w``/``v`` the extracted
    vectors; the latter are ``None`` when some matrix is not rank-one. When the
    solver did not return an optimum every beamforming field is ``None``.
    """

    method: Method
    status: Status
    W: BeamformerSet | None
    w: np.ndarray | None
    v: np.ndarray | None
    total_power: float
    rank_ratios: dict
    solver: dict
    aux: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def rank_one(self) -> bool:
        return self.w is not None

    @property
    def V(self):
        return None if self.W is None else self.W.V

    @property
    def max_rank_ratio(self) -> float:
        vals = [r for r in self.rank_ratios.values() if np.isfinite(r)]
        return max(vals, default=0.0)

    def beamformers(self) -> BeamformerSet:
        """Transmitted covariances: rebuilt from the vectors when rank-one, else the raw matrices."""
        if self.W is None:
            raise ValueError(f"no beamformers: solver status {self.status.value}")
        if self.rank_one:
            return VectorBeamformers(self.w, self.v).to_matrices()
        return self.W


def _finish(method: Method, problem: ConicProblem, result: SolveResult, config: SystemConfig,
            ratio_tol: float, meta: dict) -> BeamformingSolution:
    summary = result.summary()
    if not result.ok:
        return BeamformingSolution(method, result.status, None, None, None, float("nan"), {}, summary, meta=meta)
    bf = assembly.unpack(problem.layout, config, result.x)
    total = bf.total_power
    ratios, vectors, rank_one = {}, {}, True
    mats = [(assembly.w_name(i), A) for i, A in enumerate(bf.W)] + [(assembly.v_name(t), A) for t, A in enumerate(bf.V)]
    for name, A in mats:
        lam = np.linalg.eigvalsh(A)
        if lam[-1] <= ZERO_REL_TOL * max(total, 1e-300):
            ratios[name] = 0.0
            vectors[name] = np.zeros(config.M, dtype=complex)
            continue
        ok, ratio = check_rank_one(A, ratio_tol)
        ratios[name] = ratio
        if ok:
            vectors[name] = extract(A, ratio_tol)
        else:
            rank_one = False
    w = v = None
    if rank_one:
        w = np.array([vectors[assembly.w_name(i)] for i in range(config.U)]).reshape(config.U, config.M)
        v = np.array([vectors[assembly.v_name(t)] for t in range(config.N)]).reshape(config.N, config.M)
    aux = {name: float(result.x[k]) for name, k in problem.layout.aux.items()}
    return BeamformingSolution(method, result.status, bf, w, v, total, ratios, summary, aux, meta)


def _solve_and_finish(method, problem, config, tol, ratio_tol, meta):
    result = solve(problem, tol=tol)
    return _finish(method, problem, result, config, ratio_tol, meta)


def design(scenario: Scenario, method="Method1", config: SystemConfig | None = None, *,
           tol: float = DEFAULT_TOL, ratio_tol: float = RANK_RATIO_TOL) -> BeamformingSolution:
    """Solve the robust design with the sphere-bounding or Bernstein approximation.

    ``method`` accepts :class:`Method` values, ``Baseline``/``Benchmark``
    dispatch to :func:`design_baseline` (Bernstein) and :func:`design_benchmark`.
    """
    m = Method.parse(method)
    config = config or scenario.config
    if m is Method.BENCHMARK:
        return design_benchmark(scenario, config, tol=tol, ratio_tol=ratio_tol)
    if m is Method.BASELINE:
        return design_baseline(scenario, config, 2, tol=tol, ratio_tol=ratio_tol)
    if m is Method.METHOD1:
        problem = assemble_method1(scenario, config)
    else:
        problem = assemble_method2(scenario, config, NATIVE_SOC if m is Method.METHOD2_SOC else LMI)
    return _solve_and_finish(m, problem, config, tol, ratio_tol, {"scenario_seed": scenario.seed})


def design_benchmark(scenario: Scenario, config: SystemConfig | None = None, *,
                     tol: float = DEFAULT_TOL, ratio_tol: float = RANK_RATIO_TOL) -> BeamformingSolution:
    """Secure design assuming the estimated channels are exact (leakage constraints kept)."""
    config = config or scenario.config
    problem = assemble_perfect_csi(scenario, config)
    return _solve_and_finish(Method.BENCHMARK, problem, config, tol, ratio_tol, {"scenario_seed": scenario.seed})


def design_baseline(scenario: Scenario, config: SystemConfig | None = None, method: int = 2, *,
                    tol: float = DEFAULT_TOL, ratio_tol: float = RANK_RATIO_TOL) -> BeamformingSolution:
    """Robust design of the chosen approximation (1 or 2) without leakage constraints."""
    config = config or scenario.config
    if method == 1:
        problem = assemble_method1(scenario, config, include_leakage=False)
    elif method == 2:
        problem = assemble_method2(scenario, config, NATIVE_SOC, include_leakage=False)
    else:
        raise ValueError("baseline method must be 1 or 2")
    return _solve_and_finish(Method.BASELINE, problem, config, tol, ratio_tol,
                             {"scenario_seed": scenario.seed, "baseline_of": method})


@dataclass
class OutageReport:
    """Empirical outage frequencies with binomial standard errors."""

    sinr: np.ndarray
    leak: np.ndarray
    power: np.ndarray
    n_samples: int

    @staticmethod
    def _se(p, n):
        return np.sqrt(p * (1.0 - p) / n)

    @property
    def sinr_se(self):
        return self._se(self.sinr, self.n_samples)

    @property
    def leak_se(self):
        return self._se(self.leak, self.n_samples)

    @property
    def power_se(self):
        return self._se(self.power, self.n_samples)

    def max_outage(self) -> float:
        vals = [a.max() for a in (self.sinr, self.leak, self.power) if a.size]
        return float(max(vals, default=0.0))

    def within(self, config: SystemConfig, k_se: float = 3.0) -> bool:
        """Every frequency at most its tolerance plus ``k_se`` standard errors."""
        checks = [
            self.sinr <= config.rho + k_se * self.sinr_se,
            self.leak <= config.rho_leak + k_se * self.leak_se,
            self.power <= config.varrho + k_se * self.power_se,
        ]
        return bool(all(np.all(c) for c in checks))

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "sinr": self.sinr.tolist(), "sinr_se": self.sinr_se.tolist(),
            "leak": self.leak.tolist(), "leak_se": self.leak_se.tolist(),
            "power": self.power.tolist(), "power_se": self.power_se.tolist(),
        }


def validate_outage(sol, scenario: Scenario, n_samples: int, seed: int,
                    config: SystemConfig | None = None) -> OutageReport:
    """Count SINR, leakage and power outages of ``sol`` over ``n_samples`` error draws.

    ``sol`` is a :class:`BeamformingSolution` or a :class:`BeamformerSet`.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    config = config or scenario.config
    bf = sol.beamformers() if isinstance(sol, BeamformingSolution) else sol
    cm = build_couplings(bf, config)
    U, N = config.U, config.N
    f_out, k_out, d_out = np.zeros(U), np.zeros((U, N)), np.zeros(N)
    for start in range(0, n_samples, VALIDATION_CHUNK):
        count = min(VALIDATION_CHUNK, n_samples - start)
        f, k, d = eval_events(cm, scenario, draw_errors(scenario, count, seed, start), config)
        f_out += (f < 0).sum(axis=0)
        k_out += (k < 0).sum(axis=0)
        d_out += (d < 0).sum(axis=0)
    return OutageReport(f_out / n_samples, k_out / n_samples, d_out / n_samples, int(n_samples))


__all__ = [
    "Method", "BeamformingSolution", "OutageReport", "check_rank_one", "extract",
    "design", "design_benchmark", "design_baseline", "validate_outage", "RANK_RATIO_TOL",
]
