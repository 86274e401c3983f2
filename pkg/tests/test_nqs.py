import numpy as np
import pytest

from qmlkit.autodiff import check_grads
from qmlkit.optim import Adam
from qmlkit.quantum import PauliHamiltonian, PauliString, exact_diagonalize, tfim_chain, xxz_chain
from qmlkit.nqs import (
    LookupModel,
    WavefunctionModel,
    energy_and_grad,
    exact_energy,
    local_energies,
    local_energy,
    mcmc_sample,
    psi,
    train_nqs,
)


def minus_x(n):
    return PauliHamiltonian([PauliString.from_sites(-1.0, n, X=[i]) for i in range(n)])


def exact_samples(model, m, rng):
    p = np.abs(model.psi(np.arange(1 << model.n_sites))) ** 2
    return rng.choice(p.size, size=m, p=p / p.sum())


class TestModel:
    def test_zero_weights_constant(self):
        m = WavefunctionModel(4, rng=np.random.default_rng(0)).zero_()
        values = m.psi(np.arange(16))
        assert np.all(values == values[0])
        assert values[0] == pytest.approx(np.log(2.0))  # softplus(0)

    def test_positive_probabilities(self, rng):
        m = WavefunctionModel(5, rng=rng, init_scale=3.0)
        assert np.all(m.prob_unnormalized(np.arange(32)) > 0)

    def test_psi_by_bits_and_index(self, rng):
        m = WavefunctionModel(3, rng=rng)
        assert psi(m, [1, 0, 1]) == psi(m, 5)
        with pytest.raises(ValueError):
            psi(m, [1, 0])

    @pytest.mark.parametrize("head", [0, 1])
    def test_log_derivative(self, head, rng):
        m = WavefunctionModel(4, hidden=(6, 5), rng=rng)
        b = rng.integers(0, 16, size=5)
        c = rng.normal(size=5)
        assert check_grads(lambda: (m.log_psi(b)[head] * c).sum(), m.params) <= 1e-5

    def test_flat_round_trip(self, rng):
        m = WavefunctionModel(3, rng=rng)
        flat = m.get_flat()
        m.set_flat(flat * 2)
        np.testing.assert_array_equal(m.get_flat(), flat * 2)


class TestLocalEnergy:
    def test_minus_x_uniform(self):
        m = LookupModel(np.ones(2))
        h = PauliHamiltonian([PauliString(-1.0, "X")])
        assert local_energy(m, 0, h) == pytest.approx(-1.0)
        assert local_energy(m, [1], h) == pytest.approx(-1.0)

    def test_diagonal_is_classical_energy(self, rng):
        w = rng.normal(size=(4, 4))
        h = PauliHamiltonian([PauliString.from_sites(w[i, j], 4, Z=[i, j]) for i in range(4) for j in range(i + 1, 4)])
        m = WavefunctionModel(4, rng=rng)
        for idx in range(16):
            s = 1 - 2 * np.array([(idx >> k) & 1 for k in range(4)])
            classical = sum(w[i, j] * s[i] * s[j] for i in range(4) for j in range(i + 1, 4))
            assert local_energy(m, idx, h) == pytest.approx(classical, abs=1e-12)

    @pytest.mark.parametrize("h", [xxz_chain(4, 0.0), xxz_chain(4, -1.0), tfim_chain(6, 1.0)])
    def test_zero_variance_for_eigenstate(self, h):
        evals, gs = exact_diagonalize(h)
        m = LookupModel(gs)
        idx = np.flatnonzero(np.abs(gs.amplitudes) > 1e-8)
        e = local_energies(m, idx, h)
        assert np.var(e.real) <= 1e-10
        np.testing.assert_allclose(e, evals[0], atol=1e-8)

    def test_mean_local_energy_is_rayleigh_quotient(self, rng):
        m = WavefunctionModel(4, rng=rng)
        h = xxz_chain(4, 0.5)
        p = m.prob_unnormalized(np.arange(16))
        e = local_energies(m, np.arange(16), h)
        assert np.sum(p * e) / p.sum() == pytest.approx(exact_energy(m, h), abs=1e-12)

    def test_dead_configuration(self):
        m = LookupModel(np.array([1.0, 0.0]))
        with pytest.raises(FloatingPointError):
            local_energy(m, 1, PauliHamiltonian([PauliString(1.0, "X")]))


class TestEstimator:
    def test_constant_local_energy_zero_gradient(self, rng):
        m = WavefunctionModel(3, rng=rng)
        est = energy_and_grad(m, np.arange(8), minus_x(3), e_loc=np.full(8, -1.5 + 0.2j))
        assert all(np.all(g == 0) for g in est.gradient)
        assert est.energy == -1.5 and est.variance == 0.0

    def test_needs_two_samples(self, rng):
        with pytest.raises(ValueError):
            energy_and_grad(WavefunctionModel(2, rng=rng), [0], minus_x(2))

    def test_gradient_vs_rayleigh_quotient(self):
        rng = np.random.default_rng(0)
        m = WavefunctionModel(2, hidden=(8,), rng=rng, init_scale=0.3)
        h = minus_x(2)
        est = energy_and_grad(m, exact_samples(m, 200000, rng), h)
        flat = m.get_flat()
        fd = np.empty_like(flat)
        for k in range(flat.size):
            d = np.zeros_like(flat)
            d[k] = 1e-6
            m.set_flat(flat + d)
            hi = exact_energy(m, h)
            m.set_flat(flat - d)
            lo = exact_energy(m, h)
            fd[k] = (hi - lo) / 2e-6
        m.set_flat(flat)
        g = np.concatenate([x.reshape(-1) for x in est.gradient])
        assert np.abs(g - fd).max() <= 1e-3

    def test_stderr_scaling(self):
        rng = np.random.default_rng(1)
        m = WavefunctionModel(4, rng=rng)
        h = xxz_chain(4, 0.0)
        ratio = np.mean([energy_and_grad(m, exact_samples(m, 2000, rng), h).stderr for _ in range(20)]) / np.mean(
            [energy_and_grad(m, exact_samples(m, 1000, rng), h).stderr for _ in range(20)])
        assert abs(ratio - 1 / np.sqrt(2)) <= 0.05

    def test_unbiased(self):
        rng = np.random.default_rng(2)
        h = xxz_chain(4, 0.0)
        for _ in range(20):
            m = WavefunctionModel(4, hidden=(8,), rng=rng)
            x, _ = mcmc_sample(m, 4096, rng=rng, n_chains=256, thinning=16, kernel="mixed")
            est = energy_and_grad(m, x, h)
            assert abs(est.energy - exact_energy(m, h)) <= 3 * est.stderr

    def test_gradient_step_descends(self):
        rng = np.random.default_rng(3)
        h = xxz_chain(4, 0.0)
        for _ in range(20):
            m = WavefunctionModel(4, hidden=(8,), rng=rng)
            est = energy_and_grad(m, exact_samples(m, 20000, rng), h)
            before = exact_energy(m, h)
            g = np.concatenate([x.reshape(-1) for x in est.gradient])
            m.set_flat(m.get_flat() - 1e-3 * g / np.linalg.norm(g))
            assert exact_energy(m, h) < before


class TestSampler:
    def test_uniform_frequencies(self):
        m = WavefunctionModel(3, rng=np.random.default_rng(0)).zero_()
        n = 10**5
        x, chain = mcmc_sample(m, n, rng=np.random.default_rng(1), n_chains=1000)
        freq = np.bincount(x, minlength=8) / n
        sigma = np.sqrt(1 / 8 * 7 / 8 / n)
        assert np.all(np.abs(freq - 1 / 8) <= 3 * sigma)
        assert chain.acceptance == 1.0

    def test_concentrated(self):
        amps = np.full(16, 0.01)
        amps[9] = 1.0
        x, _ = mcmc_sample(LookupModel(amps), 5000, rng=np.random.default_rng(0), n_chains=50)
        assert np.mean(x == 9) >= 0.99

    def test_deterministic(self, rng):
        m = WavefunctionModel(4, rng=rng)
        a, _ = mcmc_sample(m, 500, rng=np.random.default_rng(7), n_chains=10)
        b, _ = mcmc_sample(m, 500, rng=np.random.default_rng(7), n_chains=10)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("kernel", ["flip", "pair", "mixed"])
    def test_kernels_sample_target(self, kernel):
        rng = np.random.default_rng(4)
        m = WavefunctionModel(4, hidden=(6,), rng=rng)
        p = m.prob_unnormalized(np.arange(16))
        x, chain = mcmc_sample(m, 50000, rng=rng, n_chains=500, kernel=kernel)
        target = p / p.sum()
        if kernel == "pair":
            # pair flips conserve parity: each class is sampled by the chains that started in it
            parity = np.array([bin(i).count("1") & 1 for i in range(16)])
            share = np.mean([bin(int(s)).count("1") & 1 for s in chain.states])
            weight = np.where(parity == 1, share, 1 - share)
            target = np.where(parity == 1, p / p[parity == 1].sum(), p / p[parity == 0].sum()) * weight
        np.testing.assert_allclose(np.bincount(x, minlength=16) / x.size, target, atol=0.01)

    def test_bad_kernel(self, rng):
        with pytest.raises(ValueError):
            mcmc_sample(WavefunctionModel(2, rng=rng), 10, rng=rng, kernel="swap")


class TestTrain:
    def test_short_run_improves(self):
        rng = np.random.default_rng(0)
        m = WavefunctionModel(4, hidden=(16,), rng=rng)
        h = xxz_chain(4, 0.0)
        start = exact_energy(m, h)
        trace = train_nqs(m, h, Adam(0.02), epochs=60, samples=256, rng=rng, n_chains=32)
        assert len(trace) == 60
        assert exact_energy(m, h) < start
        assert all(0.0 <= a <= 1.0 for a in trace.acceptance)
