import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import chisquare, kstest, ks_2samp

from iflab.bounds import incomplete_beta
from iflab.ensembles import (
    JacobiSpec,
    RngSeed,
    entry_sq_magnitude_pdf,
    jacobi_logpdf,
    sample_cue,
    sample_jacobi,
    sample_sphere_given_c,
    selberg_kappa,
    submatrix_singular_spec,
)

P_FLOOR = 1e-3


class TestCueSampler:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
    def test_unitarity(self, n):
        u = sample_cue(n, RngSeed(42, n))
        assert np.abs(u.conj().T @ u - np.eye(n)).max() <= 1e-10

    def test_determinism(self):
        a = sample_cue(3, RngSeed(7, 5))
        b = sample_cue(3, RngSeed(7, 5))
        assert np.array_equal(a, b)
        c = sample_cue(3, RngSeed(7, 6))
        assert not np.array_equal(a, c)

    def test_entry_law_uniform_n2(self):
        vals = [abs(sample_cue(2, RngSeed(1, i))[0, 0]) ** 2 for i in range(10_000)]
        assert kstest(vals, "uniform").pvalue > P_FLOOR

    def test_entry_law_n4(self):
        draws = np.array(
            [abs(sample_cue(4, RngSeed(2, i))[0, 0]) ** 2 for i in range(10_000)]
        )
        edges = np.linspace(0.0, 1.0, 21)
        counts, _ = np.histogram(draws, bins=edges)
        # CDF of (m-1)(1-mu)^(m-2) is 1 - (1-mu)^(m-1)
        cdf = 1.0 - (1.0 - edges) ** 3
        expected = np.diff(cdf) * len(draws)
        assert chisquare(counts, expected).pvalue > P_FLOOR

    def test_left_invariance(self):
        v = sample_cue(3, RngSeed(99))
        plain, rotated = [], []
        for i in range(4_000):
            u = sample_cue(3, RngSeed(3, i))
            plain.extend(np.abs(u[0]) ** 2)
            rotated.extend(np.abs((v @ u)[0]) ** 2)
        assert ks_2samp(plain, rotated).pvalue > P_FLOOR

    def test_unit_column_identity(self):
        for i in range(200):
            u = sample_cue(2, RngSeed(4, i))
            total = abs(u[0, 0]) ** 2 + abs(u[1, 0]) ** 2
            assert abs(total - 1.0) <= 1e-10

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_complementary_eigenvalues(self, k):
        worst = 0.0
        for i in range(1_000):
            u = sample_cue(4, RngSeed(5, i))
            top, bottom = u[:2, :k], u[2:, :k]
            lam1 = np.linalg.eigvalsh(top.conj().T @ top)
            lam2 = np.linalg.eigvalsh(bottom.conj().T @ bottom)
            worst = max(worst, np.abs(lam2[::-1] - (1.0 - lam1)).max())
        assert worst <= 1e-8


class TestEntryPdf:
    def test_uniform_case(self):
        assert entry_sq_magnitude_pdf(0.3, 2) == 1.0

    def test_m3_at_zero(self):
        assert entry_sq_magnitude_pdf(0.0, 3) == 2.0
        total, _ = quad(lambda mu: entry_sq_magnitude_pdf(mu, 3), 0.0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_outside_support(self):
        assert entry_sq_magnitude_pdf(1.5, 3) == 0.0

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            entry_sq_magnitude_pdf(0.5, 1)


class TestSelbergKappa:
    def test_j221(self):
        oracle = (
            math.gamma(2) * math.gamma(2) * math.gamma(2)
            / (math.gamma(2) * math.gamma(4))
        )
        assert selberg_kappa(JacobiSpec(2, 2, 1)) == pytest.approx(oracle, rel=1e-12)
        assert oracle == pytest.approx(1.0 / 6.0)

    def test_j111(self):
        assert selberg_kappa(JacobiSpec(1, 1, 1)) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("spec", [(2, 2, 2), (3, 2, 2), (5, 4, 3), (40, 40, 4)])
    def test_positive(self, spec):
        assert selberg_kappa(JacobiSpec(*spec)) > 0.0

    def test_invariants(self):
        with pytest.raises(ValueError):
            JacobiSpec(1, 2, 2)


class TestJacobiLogpdf:
    def test_j221_value(self):
        # density of J(2,2,1) is 6 lam (1 - lam)
        assert jacobi_logpdf(np.array([0.5]), JacobiSpec(2, 2, 1)) == pytest.approx(
            math.log(1.5), abs=1e-12
        )

    def test_j221_normalization(self):
        total, _ = quad(
            lambda lam: math.exp(jacobi_logpdf(np.array([lam]), JacobiSpec(2, 2, 1))),
            0.0,
            1.0,
        )
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_j222_normalization_on_ordered_domain(self):
        spec = JacobiSpec(2, 2, 2)
        inner, _ = quad(
            lambda lo: quad(
                lambda hi: math.exp(jacobi_logpdf(np.array([lo, hi]), spec)), lo, 1.0
            )[0],
            0.0,
            1.0,
        )
        assert inner == pytest.approx(1.0, abs=1e-6)

    def test_unordered_rejected(self):
        with pytest.raises(ValueError):
            jacobi_logpdf(np.array([0.7, 0.3]), JacobiSpec(2, 2, 2))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            jacobi_logpdf(np.array([1.2]), JacobiSpec(2, 2, 1))


class TestJacobiSampler:
    def test_support_and_order(self):
        for i in range(200):
            lam = sample_jacobi(JacobiSpec(3, 2, 2), RngSeed(6, i))
            assert (lam >= 0).all() and (lam <= 1).all()
            assert (np.diff(lam) >= 0).all()

    def test_j221_mean(self):
        draws = np.array(
            [sample_jacobi(JacobiSpec(2, 2, 1), RngSeed(8, i))[0] for i in range(100_000)]
        )
        # mean of 6 lam (1-lam) over [0,1] is 1/2
        assert abs(draws.mean() - 0.5) <= 0.01

    def test_j222_pooled_marginal(self):
        spec = JacobiSpec(2, 2, 2)
        draws = np.concatenate(
            [sample_jacobi(spec, RngSeed(9, i)) for i in range(20_000)]
        )
        edges = np.linspace(0.0, 1.0, 21)
        counts, _ = np.histogram(draws, bins=edges)

        # pooled-eigenvalue marginal: kappa^-1 * int (l-m)^2 dm = 6l^2 - 6l + 2
        def marginal_cdf(x):
            return 2.0 * x**3 - 3.0 * x**2 + 2.0 * x

        expected = np.diff([marginal_cdf(e) for e in edges]) * len(draws)
        assert chisquare(counts, expected).pvalue > P_FLOOR

    def test_determinism(self):
        a = sample_jacobi(JacobiSpec(2, 2, 2), RngSeed(10, 3))
        b = sample_jacobi(JacobiSpec(2, 2, 2), RngSeed(10, 3))
        assert np.array_equal(a, b)


class TestSubmatrixSpec:
    def test_thin_block(self):
        assert submatrix_singular_spec(4, 2, 1) == JacobiSpec(2, 2, 1)

    def test_wide_block_reflects(self):
        assert submatrix_singular_spec(4, 2, 3) == JacobiSpec(2, 2, 1)

    def test_boundary(self):
        assert submatrix_singular_spec(4, 2, 2) == JacobiSpec(2, 2, 2)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            submatrix_singular_spec(4, 2, 5)
        with pytest.raises(ValueError):
            submatrix_singular_spec(4, 2, 0)

    def test_degenerate_full_width(self):
        with pytest.raises(ValueError):
            submatrix_singular_spec(4, 2, 4)


class TestSphereSampler:
    def test_norm_exact(self):
        for c in (0.5, 2.0, 8.0):
            h = sample_sphere_given_c(3, c, RngSeed(11))
            assert abs(np.sum(np.abs(h) ** 2) - (2.0**c - 1.0)) <= 1e-10 * 2.0**c

    def test_two_user_uniform_share(self):
        c = 2.0
        shares = [
            abs(sample_sphere_given_c(2, c, RngSeed(12, i))[0]) ** 2 / (2.0**c - 1.0)
            for i in range(10_000)
        ]
        assert kstest(shares, "uniform").pvalue > P_FLOOR

    def test_partial_sum_beta(self):
        c, n_t, k = 3.0, 4, 2
        radius_sq = 2.0**c - 1.0
        partial = [
            min(
                np.sum(np.abs(sample_sphere_given_c(n_t, c, RngSeed(13, i))[:k]) ** 2)
                / radius_sq,
                1.0,
            )
            for i in range(10_000)
        ]

        def beta22_cdf(x):
            return incomplete_beta(x, 2, 2) / incomplete_beta(1.0, 2, 2)

        assert kstest(partial, beta22_cdf).pvalue > P_FLOOR
