import numpy as np
import pytest
from scipy import stats

from robust_swipt import assembly
from robust_swipt.errors import DomainError
from robust_swipt.linalg import chi2_inv_cdf, unembed_real
from robust_swipt.quadforms import BeamformerSet, build_couplings, channel_gain, eval_events
from robust_swipt.scenario import ErrorBatch, generate_scenario
from robust_swipt.sprocedure import assemble_method1, compute_radii, squared_radius

from conftest import ball_samples, small_config
from oracles import random_beamformers


class TestRadii:
    def test_two_dof(self):
        assert squared_radius(1, 0.1) == pytest.approx(2.3025851, abs=1e-7)

    def test_twelve_dof(self):
        assert squared_radius(6, 0.1) == pytest.approx(stats.chi2.ppf(0.9, 12) / 2, rel=1e-10)
        assert squared_radius(6, 0.1) == chi2_inv_cdf(12, 0.9) / 2

    def test_limit(self):
        assert squared_radius(1, 1 - 1e-9) == pytest.approx(1e-9, rel=1e-6)
        assert squared_radius(6, 1 - 1e-9) == pytest.approx(stats.chi2.ppf(1e-9, 12) / 2, rel=1e-8)

    @pytest.mark.parametrize("tol", [0.0, 1.0])
    def test_domain(self, tol):
        with pytest.raises(DomainError):
            squared_radius(6, tol)

    def test_monotone(self):
        vals = [squared_radius(6, t) for t in (0.01, 0.05, 0.1, 0.3, 0.6)]
        assert np.all(np.diff(vals) < 0)

    def test_per_constraint(self):
        cfg = small_config(rho=[0.05, 0.2], rho_leak=[[0.1, 0.3], [0.01, 0.5]], varrho=[0.2, 0.02])
        r = compute_radii(cfg)
        assert r.R[1] == pytest.approx(squared_radius(4, 0.2))
        # the leakage ball carries probability 1 - rho_leak
        assert r.Q_leak[1, 0] == pytest.approx(squared_radius(4, 0.01))
        assert r.Q_pow[1] == pytest.approx(squared_radius(4, 0.02))


class TestAssembly:
    def test_counts_default(self):
        sc = generate_scenario(small_config(M=6), seed=0)
        p = assemble_method1(sc)
        assert p.counts() == {("psd", 14): 8, ("psd", 12): 4, ("nonneg", 1): 8}
        assert p.n_vars == 4 * 36 + 8

    @pytest.mark.parametrize("U,N,M", [(1, 1, 2), (3, 1, 3), (2, 3, 4), (1, 0, 3)])
    def test_counts_general(self, U, N, M):
        p = assemble_method1(generate_scenario(small_config(U=U, N=N, M=M), seed=0))
        eta = U + N + U * N
        expected = {("psd", 2 * (M + 1)): eta, ("psd", 2 * M): U + N, ("nonneg", 1): eta}
        assert p.counts() == expected

    def test_without_leakage(self, small_scenario):
        p = assemble_method1(small_scenario, include_leakage=False)
        assert p.counts()[("psd", 10)] == 4
        assert not any(k.startswith("lambda") for k in p.layout.aux)

    def test_objective_is_trace(self, small_scenario, rng):
        p = assemble_method1(small_scenario)
        bf = random_beamformers(rng, 4, 2, 2)
        assert p.objective(assembly.pack(p.layout, bf)) == pytest.approx(bf.total_power, rel=1e-12)

    def test_zero_covariance_structure(self, rng):
        sc = generate_scenario(small_config(), seed=4, epsilon=0.0)
        cfg = sc.config
        p = assemble_method1(sc)
        bf = random_beamformers(rng, 4, 2, 2)
        alpha = 0.37
        x = assembly.pack(p.layout, bf, {"alpha[0]": alpha})
        Z = unembed_real(p.blocks[0].value(x))
        A = build_couplings(bf, cfg).A[0]
        h = sc.h_est[0]
        g = channel_gain(sc.H_sqrt[0], h)
        R = compute_radii(cfg).R[0]
        assert np.allclose(Z[:4, :4], alpha * np.eye(4), atol=1e-14)
        assert np.allclose(Z[:4, 4], 0, atol=1e-14)
        corner = ((h.conj() @ A @ h).real - cfg.sigma2_I[0]) / g - alpha * R
        assert Z[4, 4].real == pytest.approx(corner, rel=1e-10)

    def test_lmi_matches_quadratic_form(self, small_scenario, rng):
        # [x; 1]^H Z [x; 1] = (f(x) + mult*(|x|^2 - radius)) / g
        cfg = small_scenario.config
        p = assemble_method1(small_scenario)
        bf = random_beamformers(rng, 4, 2, 2)
        alpha = 0.2
        Z = unembed_real(p.blocks[0].value(assembly.pack(p.layout, bf, {"alpha[0]": alpha})))
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        batch = ErrorBatch(np.array([[x, np.zeros(4)]]), np.zeros((1, 2, 4)))
        f = eval_events(build_couplings(bf, cfg), small_scenario, batch)[0][0, 0]
        y = np.append(x, 1.0)
        g = channel_gain(small_scenario.H_sqrt[0], small_scenario.h_est[0])
        R = compute_radii(cfg).R[0]
        lhs = (y.conj() @ Z @ y).real
        assert lhs == pytest.approx(f / g + alpha * (np.vdot(x, x).real - R), rel=1e-9)


class TestSolved:
    def test_blocks_feasible(self, small_scenario, small_solutions):
        sol = small_solutions["Method1"]
        assert sol.ok
        p = assemble_method1(small_scenario)
        x = assembly.pack(p.layout, sol.W, sol.aux)
        for b in p.blocks:
            assert b.violation(x) <= 1e-6 * (1 + np.linalg.norm(b.const))

    def test_sprocedure_soundness(self, small_scenario, small_solutions):
        """The LMI implies the event holds everywhere inside the ball."""
        sol = small_solutions["Method1"]
        cfg = small_scenario.config
        radii = compute_radii(cfg)
        rng = np.random.default_rng(5)
        cm = build_couplings(sol.W, cfg)
        n = 1000
        e = np.stack([ball_samples(rng, n, 4, radii.R[i]) for i in range(2)], axis=1)
        for r_sq, check in [(radii.Q_pow[0], "power"), (radii.Q_leak.min(), "leak")]:
            r = np.stack([ball_samples(rng, n, 4, r_sq) for _ in range(2)], axis=1)
            f, k, d = eval_events(cm, small_scenario, ErrorBatch(e, r))
            gI = [channel_gain(small_scenario.H_sqrt[i], small_scenario.h_est[i]) for i in range(2)]
            gE = [channel_gain(small_scenario.G_sqrt[t], small_scenario.g_est[t]) for t in range(2)]
            assert np.all(f / np.array(gI) >= -1e-7)
            if check == "power":
                assert np.all(d / np.array(gE) >= -1e-7)
        # leakage balls differ per pair; check each pair on its own ball
        for i in range(2):
            for t in range(2):
                r = np.zeros((n, 2, 4), complex)
                r[:, t] = ball_samples(rng, n, 4, radii.Q_leak[i, t])
                k = eval_events(cm, small_scenario, ErrorBatch(e, r))[1][:, i, t]
                assert np.all(k / channel_gain(small_scenario.G_sqrt[t], small_scenario.g_est[t]) >= -1e-7)

    def test_power_matches_vectors(self, small_solutions):
        sol = small_solutions["Method1"]
        assert sol.rank_one
        vec_power = np.sum(np.abs(sol.w) ** 2) + np.sum(np.abs(sol.v) ** 2)
        assert vec_power == pytest.approx(sol.total_power, rel=1e-5)

    def test_against_reference_model(self, small_scenario, small_solutions):
        cp = pytest.importorskip("cvxpy")
        sc, cfg = small_scenario, small_scenario.config
        M, U, N = cfg.M, cfg.U, cfg.N
        W = [cp.Variable((M, M), hermitian=True) for _ in range(U)]
        V = [cp.Variable((M, M), hermitian=True) for _ in range(N)]
        C = sum(W) + sum(V)
        cons = [X >> 0 for X in W + V]

        def robust(Y, S, est, const, tol):
            mult = cp.Variable(nonneg=True)
            r2 = stats.chi2.ppf(1 - tol, 2 * M) / 2
            E = np.column_stack([S, est])
            g = np.linalg.norm(est) ** 2 + np.trace(S @ S).real
            corner = cp.reshape(const / g - mult * r2, (1, 1), order="F")
            D = cp.bmat([[mult * np.eye(M), np.zeros((M, 1))], [np.zeros((1, M)), corner]])
            Z = E.conj().T @ Y @ E / g + D
            return (Z + Z.H) / 2 >> 0

        for i in range(U):
            A = (1 + 1 / cfg.gamma[i]) * W[i] - C
            cons.append(robust(A, sc.H_sqrt[i], sc.h_est[i], -cfg.sigma2_I[i], cfg.rho[i]))
            for t in range(N):
                B = C - (1 + 1 / cfg.gamma_leak[i, t]) * W[i]
                cons.append(robust(B, sc.G_sqrt[t], sc.g_est[t], cfg.sigma2_E[t], cfg.rho_leak[i, t]))
        for t in range(N):
            cons.append(robust(C, sc.G_sqrt[t], sc.g_est[t], -cfg.P_req[t], cfg.varrho[t]))
        prob = cp.Problem(cp.Minimize(cp.real(cp.trace(C))), cons)
        prob.solve(solver=cp.CLARABEL)
        assert small_solutions["Method1"].total_power == pytest.approx(prob.value, rel=1e-5)
