import math

import numpy as np
import pytest

import iflab.montecarlo as mc
from iflab.bounds import ml_outage_at_rho2, ml_wc_outage_exact, ml_worst_rho2, rho2_grid
from iflab.ifrates import SearchConfig
from iflab.montecarlo import (
    ExperimentSpec,
    epsilon_outage_rate,
    estimate_outage,
    efficiency,
    trial_rates,
    with_receiver,
    worst_case_outage,
)

C = 14.0
GRID = tuple(rho2_grid(C, 32))


def make_spec(receiver="ml", trials=4000, seed=2, **kw):
    base = dict(
        n_t=2,
        capacity_bits=C,
        rho2_grid=GRID,
        receiver=receiver,
        trials=trials,
        seed=seed,
    )
    base.update(kw)
    return ExperimentSpec(**base)


class TestSpecValidation:
    def test_receiver_and_precoder_checked(self):
        with pytest.raises(ValueError):
            make_spec(receiver="zf")
        with pytest.raises(ValueError):
            make_spec(precoder="dft")

    def test_fixed_codes_need_t2(self):
        with pytest.raises(ValueError):
            make_spec(receiver="if-sic", precoder="alamouti", t=1)

    def test_ml_incompatible_with_fixed_codes(self):
        with pytest.raises(ValueError):
            make_spec(receiver="ml", precoder="golden", t=2)

    def test_rho2_range_checked(self):
        with pytest.raises(ValueError):
            make_spec(rho2_grid=(2.0 ** (C / 2.0) + 1.0,))

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            make_spec(rho2_grid=())


class TestEstimateOutage:
    def test_zero_rate_never_in_outage(self):
        spec = make_spec(trials=500)
        assert estimate_outage(spec, 10.0, 0.0).p_hat == 0.0

    def test_ml_matches_closed_form_at_worst_mode(self):
        spec = make_spec(trials=20_000)
        r = C - 1.0
        star = ml_worst_rho2(C, r)
        est = estimate_outage(spec, star, r)
        exact = ml_outage_at_rho2(C, r, star).value
        assert est.p_hat == pytest.approx(exact, abs=3 * max(est.stderr, 1e-4))

    def test_receiver_dominance_on_common_draws(self):
        spec = make_spec(receiver="if-sic", trials=1500)
        rho2 = 52.0
        r = C - 1.5
        p_sic = estimate_outage(spec, rho2, r).p_hat
        p_ml = estimate_outage(with_receiver(spec, "ml"), rho2, r).p_hat
        p_if = estimate_outage(with_receiver(spec, "if"), rho2, r).p_hat
        assert p_if >= p_sic >= p_ml

    def test_metadata_carried(self):
        spec = make_spec(trials=100)
        est = estimate_outage(spec, 0.0, 5.0)
        assert est.trials == 100
        assert est.receiver == "ml"
        assert est.a_search == "lll+permutations"
        assert est.seed == spec.seed


class TestWorstCase:
    def test_argmax_matches_analytic_worst_mode(self):
        spec = make_spec(trials=20_000)
        r = C - 1.0
        wc = worst_case_outage(spec, r)
        star = ml_worst_rho2(C, r)
        points = sorted(list(spec.rho2_grid) + [star])
        idx_wc = points.index(wc.rho2)
        idx_star = points.index(star)
        assert abs(idx_wc - idx_star) <= 1

    def test_max_property(self):
        spec = make_spec(trials=3000)
        r = C - 2.0
        wc = worst_case_outage(spec, r)
        for rho2 in spec.rho2_grid[::7]:
            assert wc.estimate.p_hat >= estimate_outage(spec, rho2, r).p_hat

    def test_reproducible(self):
        a = worst_case_outage(make_spec(trials=2000), C - 2.0)
        b = worst_case_outage(make_spec(trials=2000), C - 2.0)
        assert a == b
        r1 = trial_rates(make_spec(trials=2000), 10.0)
        r2 = trial_rates(make_spec(trials=2000), 10.0)
        assert np.array_equal(r1, r2)


class TestEpsilonRate:
    def test_matches_closed_form_inversion(self):
        spec = make_spec(trials=30_000)
        eps = 0.05
        rate = epsilon_outage_rate(spec, eps)
        delta = -math.log2(2 * eps - eps * eps)
        assert not rate.saturated
        assert rate.rate_bits == pytest.approx(C - delta, abs=0.25)

    def test_monotone_in_epsilon(self):
        spec = make_spec(trials=4000)
        rates = [epsilon_outage_rate(spec, e).rate_bits for e in (0.02, 0.05, 0.15, 0.4)]
        assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))

    def test_large_epsilon_approaches_capacity(self):
        spec = make_spec(trials=4000)
        rate = epsilon_outage_rate(spec, 0.95)
        assert rate.rate_bits >= C - 0.1

    def test_epsilon_validated(self):
        with pytest.raises(ValueError):
            epsilon_outage_rate(make_spec(trials=10), 0.0)

    def test_saturation_flag(self, monkeypatch):
        spec = make_spec(trials=100)
        zeros = np.zeros(100)
        monkeypatch.setattr(mc, "trial_rates", lambda s, rho2: zeros)
        rate = mc.epsilon_outage_rate(spec, 0.01)
        assert rate.saturated
        assert rate.rate_bits == 0.0

    def test_efficiency_closed_form(self):
        spec = make_spec(trials=30_000)
        eps = 0.05
        eta = efficiency(spec, eps)
        delta = -math.log2(2 * eps - eps * eps)
        assert eta.eta == pytest.approx((C - delta) / C, abs=0.02)
        assert 0.0 <= eta.eta <= 1.0

    def test_ml_efficiency_grows_with_capacity(self):
        # the gap at fixed epsilon is capacity-free, so eta = 1 - gap/c rises
        etas = []
        for c in (10.0, 14.0):
            spec = ExperimentSpec(
                n_t=2,
                capacity_bits=c,
                rho2_grid=tuple(rho2_grid(c, 24)),
                receiver="ml",
                trials=20_000,
                seed=2,
            )
            etas.append(efficiency(spec, 0.05).eta)
        assert etas[1] > etas[0]


class TestIfSicWorstCase:
    def test_bracketed_by_bounds(self):
        from iflab.bounds import ifsic_wc_outage_upper_simple

        spec = make_spec(receiver="if-sic", trials=1500, rho2_grid=tuple(rho2_grid(C, 16)))
        for dc in (2.0, 4.0):
            wc = worst_case_outage(spec, C - dc)
            lo = ml_wc_outage_exact(dc).value
            hi = ifsic_wc_outage_upper_simple(dc).value
            assert wc.estimate.p_hat >= lo - 3 * wc.estimate.stderr
            assert wc.estimate.p_hat <= hi + 3 * wc.estimate.stderr

    def test_search_method_recorded(self):
        spec = make_spec(
            receiver="if-sic",
            trials=200,
            rho2_grid=(10.0,),
            a_search=SearchConfig(method="lll"),
        )
        est = estimate_outage(spec, 10.0, 5.0)
        assert est.a_search == "lll"
