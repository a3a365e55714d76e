import numpy as np
import pytest
from hypothesis import settings

from robust_swipt.scenario import SystemConfig, generate_scenario

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def small_config(**kw) -> SystemConfig:
    args = dict(M=4, U=2, N=2, gamma_dB=10, gamma_leak_dB=-5, P_req_dBm=-10)
    args.update(kw)
    M, U, N = args.pop("M"), args.pop("U"), args.pop("N")
    return SystemConfig.from_db(M, U, N, **args)


@pytest.fixture(scope="session")
def small_scenario():
    return generate_scenario(small_config(), seed=11)


def random_hermitian(rng, M, psd=False, rank=None):
    if psd:
        k = M if rank is None else rank
        B = rng.standard_normal((M, k)) + 1j * rng.standard_normal((M, k))
        return B @ B.conj().T
    G = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    return (G + G.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_solutions(small_scenario):
    from robust_swipt.solution import design
    names = ("Method1", "Method2-soc", "Method2-lmi", "Benchmark", "Baseline")
    return {m: design(small_scenario, m) for m in names}


def ball_samples(rng, count, M, radius_sq, boundary=0.2):
    """Points of the complex ball ``|x|^2 <= radius_sq``; a fraction lies on the sphere."""
    z = rng.standard_normal((count, 2 * M))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    u = rng.uniform(size=(count, 1)) ** (1.0 / (2 * M))
    u[: int(boundary * count)] = 1.0
    return (z[:, :M] + 1j * z[:, M:]) * u * np.sqrt(radius_sq)
