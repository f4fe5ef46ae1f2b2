"""Rayleigh-fading multiple-access channel experiments: symmetric-rate
capacity, capacity-conditioned outage, and distributed space-time-precoded
integer forcing.

Channel draws conditioned on the sum capacity use the exact sphere
construction (the conditional law of an i.i.d. complex Gaussian vector given
its norm) rather than rejection sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ensembles import RngSeed, sample_sphere_given_c
from .ifrates import IfRateResult, SearchConfig, _ml_rates_batch, if_sic_rate
from .linalg import complex_to_real
from .montecarlo import OutageEstimate, _embed_batch, _if_rates_batch
from .precoders import Precoder, badr_belfiore, identity_precoder

MAC_PRECODER_LABELS = ("none", "cue-st", "badr-belfiore")


@dataclass(frozen=True)
class MacChannel:
    """Per-user complex gains with the SNR absorbed into the channel."""

    h: np.ndarray
    snr: float

    def __post_init__(self):
        if not np.isfinite(self.h).all():
            raise ValueError("channel gains must be finite")


@dataclass(frozen=True)
class MacRates:
    c_sum: float
    c_sym: float
    bottleneck_subset: tuple


def sample_rayleigh_mac(n_t: int, snr: float, rng: RngSeed) -> MacChannel:
    """Independent per-user gains sqrt(snr) * CN(0, 1)."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    g = rng.generator()
    h = (g.standard_normal(n_t) + 1j * g.standard_normal(n_t)) / math.sqrt(2.0)
    return MacChannel(h=h * math.sqrt(snr), snr=snr)


def _subset_masks(n_t: int) -> np.ndarray:
    masks = np.zeros((2**n_t - 1, n_t))
    for s in range(1, 2**n_t):
        for i in range(n_t):
            if s >> i & 1:
                masks[s - 1, i] = 1.0
    return masks


def _csym_batch(power: np.ndarray):
    """Vectorized symmetric-rate capacity for a stack of |h|^2 rows.

    Returns (c_sum, c_sym, argmin subset index) with subsets bit-indexed
    from 1; index 2^n_t - 1 is the full set.
    """
    n_t = power.shape[1]
    masks = _subset_masks(n_t)
    sizes = masks.sum(axis=1)
    sums = power @ masks.T
    rates = (n_t / sizes)[None, :] * np.log2(1.0 + sums)
    arg = np.argmin(rates, axis=1)
    c_sym = rates[np.arange(len(rates)), arg]
    c_sum = rates[:, 2**n_t - 2]  # full-set rate, bit-identical to the min's term
    return c_sum, c_sym, arg + 1


def mac_rates(ch: MacChannel) -> MacRates:
    """Sum capacity and the bottleneck-limited symmetric-rate capacity."""
    power = (np.abs(ch.h) ** 2)[None, :]
    c_sum, c_sym, arg = _csym_batch(power)
    bits = int(arg[0])
    subset = tuple(i for i in range(len(ch.h)) if bits >> i & 1)
    return MacRates(c_sum=float(c_sum[0]), c_sym=float(c_sym[0]), bottleneck_subset=subset)


@lru_cache(maxsize=64)
def _sphere_draws(n_t: int, c: float, trials: int, seed: int) -> np.ndarray:
    out = np.empty((trials, n_t), dtype=complex)
    for i in range(trials):
        out[i] = sample_sphere_given_c(n_t, c, RngSeed(seed, 2 * i))
    return out


@lru_cache(maxsize=64)
def _sphere_csym(n_t: int, c: float, trials: int, seed: int):
    power = np.abs(_sphere_draws(n_t, c, trials, seed)) ** 2
    c_sum, c_sym, arg = _csym_batch(power)
    full = arg == 2**n_t - 1
    # the sphere construction pins the full-set rate at exactly c; evaluating
    # it through log2 would scatter the atom across one ulp and break the
    # strict-inequality outage count
    c_sym = np.where(full, c, c_sym)
    return c_sym, full


def sym_outage_given_c(n_t: int, c: float, r: float, trials: int, rng: RngSeed) -> OutageEstimate:
    """Monte Carlo P(C_sym < r | C = c); ties count as non-outage."""
    if r < 0 or trials < 1:
        raise ValueError("need r >= 0 and trials >= 1")
    c_sym, _ = _sphere_csym(n_t, c, trials, rng.seed)
    p = float(np.count_nonzero(c_sym < r)) / trials
    return OutageEstimate(
        p_hat=p,
        stderr=math.sqrt(p * (1.0 - p) / trials),
        trials=trials,
        receiver="ml",
        a_search="none",
        seed=rng.seed,
    )


@dataclass(frozen=True)
class SymCapacityPdf:
    bin_edges: np.ndarray
    density: np.ndarray
    atom: float
    trials: int

    def total_mass(self) -> float:
        widths = np.diff(self.bin_edges)
        return float(np.sum(widths * self.density) + self.atom)


def sym_capacity_pdf_data(
    n_t: int, c: float, trials: int, bins: int, rng: RngSeed
) -> SymCapacityPdf:
    """Histogram of the conditional symmetric-rate capacity plus the point
    mass at C_sym = c.  A trial lands in the atom exactly when its bottleneck
    subset is the full user set."""
    c_sym, full = _sphere_csym(n_t, c, trials, rng.seed)
    continuous = c_sym[~full]
    counts, edges = np.histogram(continuous, bins=bins, range=(0.0, c))
    widths = np.diff(edges)
    density = counts / (trials * widths)
    return SymCapacityPdf(
        bin_edges=edges, density=density, atom=float(np.mean(full)), trials=trials
    )


def _stack_user_blocks(h: np.ndarray, precoders) -> np.ndarray:
    t = precoders[0].t
    blocks = []
    for gain, p in zip(h, precoders):
        if p.t != t:
            raise ValueError("all per-user precoders must share the same t")
        if p.cmap is None:
            raise ValueError(f"precoder {p.label!r} has no complex-linear form")
        blocks.append(gain * p.cmap)
    return np.concatenate(blocks, axis=1)


def distributed_if_rate(
    ch: MacChannel, per_user_precoders, cfg: SearchConfig = SearchConfig()
) -> IfRateResult:
    """IF-SIC rate when each user precodes only its own streams: the receiver
    sees [h_1 P_1 | h_2 P_2 | ...] over the shared t channel uses."""
    if len(per_user_precoders) != len(ch.h):
        raise ValueError("need exactly one precoder per user")
    eff_c = _stack_user_blocks(ch.h, per_user_precoders)
    t = per_user_precoders[0].t
    return if_sic_rate(complex_to_real(eff_c), t=t, cfg=cfg)


def distributed_ml_rate(ch: MacChannel, per_user_precoders) -> float:
    eff_c = _stack_user_blocks(ch.h, per_user_precoders)
    t = per_user_precoders[0].t
    return float(_ml_rates_batch(eff_c[None], t)[0])


def _per_trial_precoders(label: str, n_t: int, seed: int, trial: int):
    if label == "none":
        p = identity_precoder(1, 1)
        return (p,) * n_t
    if label == "badr-belfiore":
        if n_t != 2:
            raise ValueError("the fixed MAC precoder pair is two-user only")
        return badr_belfiore()
    if label == "cue-st":
        g = RngSeed(seed, 2 * trial + 1).generator()
        out = []
        for _ in range(n_t):
            # fold a fresh draw per user out of the trial's precoder stream
            u = _cue_from(g, 2)
            out.append(
                Precoder(kind="cue_space_time", t=2, n_symbols=4,
                         map=complex_to_real(u), label="cue-st", cmap=u)
            )
        return tuple(out)
    raise ValueError(f"unknown MAC precoder label {label!r}")


def _cue_from(g: np.random.Generator, n: int) -> np.ndarray:
    z = (g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d.conj() / np.abs(d))


def distributed_rates_given_c(
    n_t: int,
    c: float,
    trials: int,
    seed: int,
    precoder_label: str = "none",
    receiver: str = "if-sic",
    cfg: SearchConfig = SearchConfig(),
) -> np.ndarray:
    """Per-trial distributed rates on capacity-conditioned channel draws,
    one common draw set per (n_t, c, trials, seed)."""
    draws = _sphere_draws(n_t, c, trials, seed)
    stacks = []
    t = 1 if precoder_label == "none" else 2
    for i in range(trials):
        precs = _per_trial_precoders(precoder_label, n_t, seed, i)
        stacks.append(_stack_user_blocks(draws[i], precs))
    eff = np.stack(stacks)
    if receiver == "ml":
        return _ml_rates_batch(eff, t)
    real = _embed_batch(eff)
    return _if_rates_batch(real, t, receiver == "if-sic", cfg)


@dataclass(frozen=True)
class ErgodicRow:
    c_sum_center: float
    mean_rate: float
    mean_c_sym: float
    fraction: float
    count: int


def ergodic_fraction_data(
    n_t: int,
    snr_grid,
    receiver: str,
    precoder_label: str,
    trials: int,
    rng: RngSeed,
    bins: int = 12,
    cfg: SearchConfig = SearchConfig(),
):
    """Conditional means of achieved rate and symmetric-rate capacity in
    sum-capacity bins; the reported fraction is the ratio of the two means."""
    all_power = []
    all_rates_inputs = []
    for si, snr in enumerate(snr_grid):
        for i in range(trials):
            idx = si * trials + i
            ch = sample_rayleigh_mac(n_t, snr, RngSeed(rng.seed, 2 * idx))
            all_power.append(np.abs(ch.h) ** 2)
            all_rates_inputs.append((ch, idx))
    power = np.asarray(all_power)
    c_sum, c_sym, _ = _csym_batch(power)

    if receiver == "ml":
        rates = c_sym.copy()
    else:
        t = 1 if precoder_label == "none" else 2
        stacks = [
            _stack_user_blocks(ch.h, _per_trial_precoders(precoder_label, n_t, rng.seed, idx))
            for ch, idx in all_rates_inputs
        ]
        real = _embed_batch(np.stack(stacks))
        rates = _if_rates_batch(real, t, receiver == "if-sic", cfg)

    edges = np.linspace(c_sum.min(), c_sum.max() + 1e-9, bins + 1)
    rows = []
    for b in range(bins):
        mask = (c_sum >= edges[b]) & (c_sum < edges[b + 1])
        n = int(np.count_nonzero(mask))
        if n == 0:
            continue
        mean_rate = float(np.mean(rates[mask]))
        mean_sym = float(np.mean(c_sym[mask]))
        rows.append(
            ErgodicRow(
                c_sum_center=float(0.5 * (edges[b] + edges[b + 1])),
                mean_rate=mean_rate,
                mean_c_sym=mean_sym,
                fraction=mean_rate / mean_sym if mean_sym > 0 else 0.0,
                count=n,
            )
        )
    return rows
