"""Monte Carlo outage experiments over the compound channel.

A trial draws a Haar unitary, applies it to the diagonal channel
diag(sqrt(rho_1), ..., sqrt(rho_nt)) (time-extended when t > 1, composed
with a fixed algebraic map when one is selected), and scores the selected
receiver's achievable rate.  Trials are seeded per (seed, trial_index), so
every receiver sees the same channel draws and estimates are bit-identical
across runs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .bounds import ml_worst_rho2
from .ensembles import RngSeed, sample_cue
from .ifrates import SearchConfig, _ml_rates_batch, lll_reduce
from .linalg import CompoundChannel
from .precoders import alamouti, golden_code

RECEIVERS = ("if", "if-sic", "ml")
PRECODERS = ("none", "cue", "cue-st", "alamouti", "golden")
_FIXED_MAPS = {"alamouti": alamouti, "golden": golden_code}


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that pins down one outage experiment."""

    n_t: int
    capacity_bits: float
    rho2_grid: tuple
    receiver: str
    trials: int
    seed: int
    t: int = 1
    n_r: int = 2
    precoder: str = "cue"
    a_search: SearchConfig = field(default_factory=SearchConfig)
    compose_cue: bool = True

    def __post_init__(self):
        if self.receiver not in RECEIVERS:
            raise ValueError(f"receiver must be one of {RECEIVERS}")
        if self.precoder not in PRECODERS:
            raise ValueError(f"precoder must be one of {PRECODERS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.t < 1 or self.n_t < 1 or self.n_r < 1:
            raise ValueError("dimensions must be positive")
        if not self.rho2_grid:
            raise ValueError("rho2_grid must be nonempty")
        hi = compound_tail_max(self.capacity_bits, self.n_t)
        if any(not 0.0 <= v <= hi + 1e-9 for v in self.rho2_grid):
            raise ValueError(f"rho2 values must lie in [0, 2^(c/{self.n_t}) - 1]")
        if self.precoder == "cue" and self.t != 1:
            raise ValueError("space-only precoding is a t=1 scheme")
        if self.precoder in _FIXED_MAPS:
            if self.t != 2 or self.n_t != 2:
                raise ValueError(f"{self.precoder} precoding needs n_t=2, t=2")
            if self.receiver == "ml":
                raise ValueError("the ML benchmark is defined for complex-linear precoding only")
        if self.n_r < self.n_t and any(v > 0 for v in self.rho2_grid):
            raise ValueError("with n_r < n_t the weak modes must be zero")


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    stderr: float
    trials: int
    receiver: str
    a_search: str
    seed: int


@dataclass(frozen=True)
class WorstCaseResult:
    estimate: OutageEstimate
    rho2: float


@dataclass(frozen=True)
class EpsilonRate:
    rate_bits: float
    saturated: bool


@dataclass(frozen=True)
class Efficiency:
    eta: float
    saturated: bool


@lru_cache(maxsize=32)
def _unitary_draws(seed: int, trials: int, dim: int) -> np.ndarray:
    """Per-trial Haar draws, one independent stream per trial index."""
    out = np.empty((trials, dim, dim), dtype=complex)
    for i in range(trials):
        out[i] = sample_cue(dim, RngSeed(seed, i))
    return out


def _channel(spec: ExperimentSpec, rho2: float) -> CompoundChannel:
    if spec.n_t == 2:
        return CompoundChannel.two_modes(spec.capacity_bits, rho2)
    return CompoundChannel.equal_tail(spec.n_t, spec.capacity_bits, rho2)


def _embed_batch(stack: np.ndarray) -> np.ndarray:
    re, im = stack.real, stack.imag
    top = np.concatenate([re, -im], axis=2)
    bot = np.concatenate([im, re], axis=2)
    return np.concatenate([top, bot], axis=1)


def _effective_complex(spec: ExperimentSpec, rho2: float) -> np.ndarray:
    """Stack of per-trial effective complex channels for complex-linear
    precoding labels."""
    ch = _channel(spec, rho2)
    if spec.precoder == "none":
        d = ch.diagonal_extended(spec.t) if spec.t > 1 else ch.diagonal()
        return np.broadcast_to(d, (spec.trials,) + d.shape)
    if spec.precoder == "cue":
        u = _unitary_draws(spec.seed, spec.trials, spec.n_t)
        return ch.diagonal()[None, :, :] @ u
    if spec.precoder == "cue-st":
        u = _unitary_draws(spec.seed, spec.trials, spec.n_t * spec.t)
        return ch.diagonal_extended(spec.t)[None, :, :] @ u
    raise ValueError(f"{spec.precoder} has no complex-linear form")


def _effective_real(spec: ExperimentSpec, rho2: float) -> np.ndarray:
    """Stack of per-trial real effective channels seen by the IF receivers."""
    if spec.precoder in _FIXED_MAPS:
        ch = _channel(spec, rho2)
        if spec.compose_cue:
            u = _unitary_draws(spec.seed, spec.trials, spec.n_t)
            phys = ch.diagonal()[None, :, :] @ u
        else:
            d = ch.diagonal()
            phys = np.broadcast_to(d, (spec.trials,) + d.shape)
        eye_t = np.eye(spec.t)
        extended = np.einsum("ab,ncd->nacbd", eye_t, phys).reshape(
            spec.trials, spec.t * spec.n_t, spec.t * spec.n_t
        )
        return _embed_batch(extended) @ _FIXED_MAPS[spec.precoder]().map
    return _embed_batch(_effective_complex(spec, rho2))


def _if_rates_batch(h_stack: np.ndarray, t: int, sic: bool, cfg: SearchConfig) -> np.ndarray:
    n, _, cols = h_stack.shape
    gram = np.einsum("nri,nrj->nij", h_stack, h_stack)
    k = np.linalg.inv(np.eye(cols)[None, :, :] + gram)
    k = 0.5 * (k + np.transpose(k, (0, 2, 1)))
    basis = np.linalg.cholesky(k)
    a = np.empty((n, cols, cols))
    for i in range(n):
        _, u = lll_reduce(basis[i], cfg.lll_delta)
        a[i] = u
    m = np.einsum("nij,njk,nlk->nil", a, k, a)
    m = 0.5 * (m + np.transpose(m, (0, 2, 1)))
    if not sic:
        worst = np.einsum("nii->ni", m).max(axis=1)
        return np.clip(cols * 0.5 * np.log2(1.0 / worst) / t, 0.0, None)
    if cols <= 4 and cfg.method != "lll":
        perms = list(itertools.permutations(range(cols)))
        stacked = np.empty((len(perms), n, cols, cols))
        for j, p in enumerate(perms):
            idx = np.asarray(p)
            stacked[j] = m[:, idx[:, None], idx[None, :]]
        diags = np.einsum("pnii->pni", np.linalg.cholesky(stacked))
        worst = diags.max(axis=2).min(axis=0)
    else:
        order = np.argsort(np.einsum("nii->ni", m), axis=1)
        m_sorted = np.take_along_axis(
            np.take_along_axis(m, order[:, :, None], axis=1), order[:, None, :], axis=2
        )
        diags = np.einsum("nii->ni", np.linalg.cholesky(m_sorted))
        worst = diags.max(axis=1)
    return np.clip(cols * (-np.log2(worst)) / t, 0.0, None)


def trial_rates(spec: ExperimentSpec, rho2: float) -> np.ndarray:
    """Per-trial achievable rates (bits/complex use) at a fixed weak mode."""
    return _trial_rates_cached(spec, float(rho2))


@lru_cache(maxsize=512)
def _trial_rates_cached(spec: ExperimentSpec, rho2: float) -> np.ndarray:
    if spec.receiver == "ml":
        eff = _effective_complex(spec, rho2)
        rates = _ml_rates_batch(eff, spec.t)
    else:
        eff = _effective_real(spec, rho2)
        rates = _if_rates_batch(eff, spec.t, spec.receiver == "if-sic", spec.a_search)
    rates.setflags(write=False)
    return rates


def _estimate_from_rates(spec: ExperimentSpec, rates: np.ndarray, r: float) -> OutageEstimate:
    p = float(np.count_nonzero(rates < r)) / spec.trials
    return OutageEstimate(
        p_hat=p,
        stderr=math.sqrt(p * (1.0 - p) / spec.trials),
        trials=spec.trials,
        receiver=spec.receiver,
        a_search=spec.a_search.method,
        seed=spec.seed,
    )


def estimate_outage(spec: ExperimentSpec, rho2: float, r: float) -> OutageEstimate:
    """Fraction of trials whose rate falls strictly below r at this rho2."""
    return _estimate_from_rates(spec, trial_rates(spec, rho2), r)


def _sweep_points(spec: ExperimentSpec, r: float) -> list:
    points = list(spec.rho2_grid)
    if spec.receiver == "ml" and r < spec.capacity_bits:
        points.append(ml_worst_rho2(spec.capacity_bits, r))
    return points


def worst_case_outage(spec: ExperimentSpec, r: float) -> WorstCaseResult:
    """Max of estimate_outage over the rho2 sweep (plus the analytic ML
    worst mode when applicable); returns the attaining rho2."""
    points = _sweep_points(spec, r)
    estimates = [estimate_outage(spec, rho2, r) for rho2 in points]
    idx = int(np.argmax([e.p_hat for e in estimates]))
    return WorstCaseResult(estimate=estimates[idx], rho2=points[idx])


def epsilon_outage_rate(spec: ExperimentSpec, epsilon: float) -> EpsilonRate:
    """Largest rate whose worst-case outage stays at or below epsilon,
    located by bisection on the common-draw outage curve."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    c = spec.capacity_bits
    resolution = c * 2.0**-20
    if worst_case_outage(spec, resolution).estimate.p_hat > epsilon:
        return EpsilonRate(rate_bits=0.0, saturated=True)
    if worst_case_outage(spec, c).estimate.p_hat <= epsilon:
        return EpsilonRate(rate_bits=c, saturated=False)
    lo, hi = resolution, c
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if worst_case_outage(spec, mid).estimate.p_hat <= epsilon:
            lo = mid
        else:
            hi = mid
    return EpsilonRate(rate_bits=lo, saturated=False)


def efficiency(spec: ExperimentSpec, epsilon: float) -> Efficiency:
    """Guaranteed fraction of the mutual information at outage level epsilon."""
    rate = epsilon_outage_rate(spec, epsilon)
    return Efficiency(eta=rate.rate_bits / spec.capacity_bits, saturated=rate.saturated)


def compound_tail_max(c: float, n_t: int) -> float:
    """Largest weak-mode SNR admitted by the descending equal-tail sweep."""
    return 2.0 ** (c / n_t) - 1.0


def default_rho2_grid(c: float, points: int = 64, n_t: int = 2) -> tuple:
    """Log-spaced weak-mode sweep starting at exactly zero."""
    hi = compound_tail_max(c, n_t)
    if hi <= 0.0 or points <= 1:
        return (0.0,)
    lo = hi * 1e-6
    return (0.0,) + tuple(np.geomspace(lo, hi, points - 1))


def with_receiver(spec: ExperimentSpec, receiver: str) -> ExperimentSpec:
    """Same experiment, same draws, different receiver."""
    return replace(spec, receiver=receiver)
