import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iflab.ifrates import (
    SearchConfig,
    if_gram,
    if_plain_rate,
    if_sic_rate,
    lll_reduce,
    ml_mac_rate,
    search_integer_matrix,
    sic_rate_for_matrix,
)
from iflab.linalg import complex_to_real, wi_capacity


def rand_complex(rng, rows, cols, scale=1.0):
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


class TestIfGram:
    def test_zero_channel(self):
        assert np.allclose(if_gram(np.zeros((2, 2))), np.eye(2))

    def test_identity_channel(self):
        assert np.allclose(if_gram(np.eye(2)), 0.5 * np.eye(2))

    def test_inverse_property(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal((4, 4))
        k = if_gram(h)
        assert np.abs(k @ (np.eye(4) + h.T @ h) - np.eye(4)).max() <= 1e-9

    def test_eigenvalues_in_unit_interval(self):
        rng = np.random.default_rng(1)
        h = rng.standard_normal((3, 3)) * 3
        eig = np.linalg.eigvalsh(if_gram(h))
        assert eig.min() > 0.0
        assert eig.max() <= 1.0 + 1e-12


class TestLll:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 6))
    def test_transform_tracks_basis(self, seed, n):
        rng = np.random.default_rng(seed)
        basis = rng.standard_normal((n, n)) + np.eye(n) * 0.5
        reduced, u = lll_reduce(basis)
        assert np.abs(reduced - u @ basis).max() <= 1e-8
        assert abs(abs(round(float(np.linalg.det(u)))) - 1) == 0

    def test_identity_lattice(self):
        reduced, u = lll_reduce(np.eye(3))
        assert np.abs(np.abs(np.linalg.det(reduced)) - 1.0) < 1e-12


class TestSearchIntegerMatrix:
    def test_identity_gram(self):
        a = search_integer_matrix(np.eye(4))
        rate_a = _sic_rate_of(np.eye(4), a)
        rate_i = _sic_rate_of(np.eye(4), np.eye(4, dtype=int))
        assert rate_a == pytest.approx(rate_i, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_full_rank(self, seed):
        rng = np.random.default_rng(seed)
        h = rng.standard_normal((4, 4)) * 2
        a = search_integer_matrix(if_gram(h))
        assert abs(np.linalg.det(a)) >= 0.5

    def test_exhaustive_dimension_guard(self):
        rng = np.random.default_rng(3)
        h = rng.standard_normal((6, 6))
        with pytest.raises(ValueError):
            search_integer_matrix(if_gram(h), SearchConfig(method="exhaustive"))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(method="random")
        with pytest.raises(ValueError):
            SearchConfig(lll_delta=0.1)


def _sic_rate_of(k, a):
    a = np.asarray(a, dtype=float)
    m = a @ k @ a.T
    ell = np.linalg.cholesky(0.5 * (m + m.T))
    return float(k.shape[0] * (-np.log2(ell.diagonal().max())))


class TestIfSicRate:
    def test_zero_channel(self):
        res = if_sic_rate(np.zeros((4, 4)))
        assert res.rate_bits == 0.0

    def test_orthogonal_channel_hits_capacity(self):
        h = complex_to_real(math.sqrt(3.0) * np.eye(2, dtype=complex))
        res = if_sic_rate(h)
        assert res.rate_bits == pytest.approx(4.0, abs=1e-9)
        assert np.allclose(res.ell_diag**2, 0.25, atol=1e-9)
        exhaustive = if_sic_rate(h, cfg=SearchConfig(method="exhaustive"))
        assert exhaustive.rate_bits == pytest.approx(res.rate_bits, abs=1e-12)

    def test_below_wi_capacity(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            hc = rand_complex(rng, 2, 2, scale=2.0)
            res = if_sic_rate(complex_to_real(hc))
            assert res.rate_bits <= wi_capacity(hc) + 1e-9

    def test_lll_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            hc = rand_complex(rng, 2, 2, scale=3.0)
            hr = complex_to_real(hc)
            fast = if_sic_rate(hr).rate_bits
            oracle = if_sic_rate(hr, cfg=SearchConfig(method="exhaustive")).rate_bits
            assert fast == pytest.approx(oracle, abs=1e-9)

    def test_receiver_rotation_invariance(self):
        rng = np.random.default_rng(6)
        hc = rand_complex(rng, 2, 2, scale=2.0)
        q, _ = np.linalg.qr(rand_complex(rng, 2, 2))
        base = if_sic_rate(complex_to_real(hc)).rate_bits
        rotated = if_sic_rate(complex_to_real(q @ hc)).rate_bits
        assert rotated == pytest.approx(base, rel=1e-8, abs=1e-8)

    def test_unimodular_gram_invariance(self):
        rng = np.random.default_rng(7)
        h = rng.standard_normal((2, 2)) * 2
        k = if_gram(h)
        u = np.array([[1, 1], [0, 1]])
        k2 = u @ k @ u.T
        cfg = SearchConfig(method="exhaustive")
        r1 = _best_exhaustive_rate(k, cfg)
        r2 = _best_exhaustive_rate(k2, cfg)
        assert r1 == pytest.approx(r2, abs=1e-9)

    def test_scaling_monotonicity_on_fixed_a(self):
        rng = np.random.default_rng(8)
        h = rng.standard_normal((4, 4))
        a = if_sic_rate(h).a_matrix
        rates = [sic_rate_for_matrix(alpha * h, a) for alpha in (1.0, 1.5, 2.0, 4.0)]
        assert all(r2 >= r1 - 1e-12 for r1, r2 in zip(rates, rates[1:]))


def _best_exhaustive_rate(k, cfg):
    a = search_integer_matrix(k, cfg)
    best = -np.inf
    for perm in itertools.permutations(range(k.shape[0])):
        best = max(best, _sic_rate_of(k, a[list(perm)]))
    return best


class TestIfPlainRate:
    def test_zero_channel(self):
        assert if_plain_rate(np.zeros((4, 4))).rate_bits == 0.0

    def test_orthogonal_same_as_sic(self):
        h = complex_to_real(math.sqrt(3.0) * np.eye(2, dtype=complex))
        assert if_plain_rate(h).rate_bits == pytest.approx(if_sic_rate(h).rate_bits, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_plain_below_sic(self, seed):
        rng = np.random.default_rng(seed)
        hc = rand_complex(rng, 2, 2, scale=2.0)
        hr = complex_to_real(hc)
        assert if_plain_rate(hr).rate_bits <= if_sic_rate(hr).rate_bits + 1e-9


class TestMlMacRate:
    def test_dead_stream_gives_zero(self):
        h = np.diag([math.sqrt(7.0), 0.0]).astype(complex)
        assert ml_mac_rate(h, 2, 1) == 0.0

    def test_balanced_diagonal(self):
        h = math.sqrt(3.0) * np.eye(2, dtype=complex)
        # two singles at 2 log2(4) and the pair at log2 det = 4
        assert ml_mac_rate(h, 2, 1) == pytest.approx(4.0, abs=1e-12)

    def test_matches_subset_bruteforce(self):
        rng = np.random.default_rng(9)
        h = rand_complex(rng, 2, 4)
        fast = ml_mac_rate(h, 4, 1)
        best = np.inf
        for size in range(1, 5):
            for subset in itertools.combinations(range(4), size):
                sub = h[:, list(subset)]
                gram = np.eye(size) + sub.conj().T @ sub
                rate = 4.0 / size * math.log2(np.linalg.det(gram).real)
                best = min(best, rate)
        assert fast == pytest.approx(best, abs=1e-9)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ml_mac_rate(np.eye(2, dtype=complex), 3, 1)


class TestDominance:
    def test_chain_on_random_channels(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            hc = rand_complex(rng, 2, 2, scale=2.5)
            hr = complex_to_real(hc)
            plain = if_plain_rate(hr).rate_bits
            sic = if_sic_rate(hr).rate_bits
            ml = ml_mac_rate(hc, 2, 1)
            wi = wi_capacity(hc)
            assert plain <= sic + 1e-9
            assert sic <= ml + 1e-9
            assert ml <= wi + 1e-9
