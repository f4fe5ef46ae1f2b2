"""Closed-form and semi-numerical worst-case outage bounds.

Everything is expressed for a two-mode compound channel with white-input
mutual information ``c`` bits and target rate ``r = c - delta_c``.  The weak
mode rho2 ranges over [0, 2^(c/2) - 1]; the strong mode is pinned by
rho1 = 2^c / (1 + rho2) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, betaln, comb

from .ensembles import JacobiSpec, RngSeed, sample_jacobi, selberg_log_kappa
from .errors import EnumerationLimitError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundValue:
    """Probability bound with its evaluation route and error estimate."""

    value: float
    method: str  # "closed-form" | "quadrature" | "monte-carlo"
    abs_error: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("bound values are probabilities in [0, 1]")
        if self.abs_error < 0.0:
            raise ValueError("abs_error must be nonnegative")


@dataclass(frozen=True)
class QuadConfig:
    """Knobs for the space-time lower bound evaluation."""

    nodes: int = 128
    rho2_points: int = 256
    refine: bool = True
    mc_samples: int = 1_000_000
    mc_seed: int = 20140605


def rho2_max(c: float) -> float:
    return 2.0 ** (c / 2.0) - 1.0


def rho2_grid(c: float, points: int = 64) -> np.ndarray:
    """Log-spaced sweep of the weak mode, always starting at exactly 0."""
    hi = rho2_max(c)
    if hi <= 0.0 or points <= 1:
        return np.zeros(1)
    lo = hi * 1e-6
    return np.concatenate(([0.0], np.geomspace(lo, hi, points - 1)))


def incomplete_beta(x, a: float, b: float):
    """Unnormalized incomplete beta integral of u^(a-1) (1-u)^(b-1) over [0, x].

    Accepts a scalar or an array of evaluation points.
    """
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    arr = np.asarray(x, dtype=float)
    if (arr < 0.0).any() or (arr > 1.0).any():
        raise ValueError("x must lie in [0, 1]")
    out = betainc(a, b, arr) * math.exp(betaln(a, b))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def ifsic_wc_outage_upper_simple(delta_c: float) -> BoundValue:
    """Explicit worst-case IF-SIC outage upper bound 81 pi^2 2^(-delta_c).

    Valid only for gaps above one bit.
    """
    if delta_c <= 1.0:
        raise ValueError("the explicit bound requires delta_c > 1")
    raw = 81.0 * math.pi**2 * 2.0 ** (-delta_c)
    return BoundValue(value=min(raw, 1.0), method="closed-form")


def _primitive_vectors(n_dim: int, radius_sq: float, max_points: int):
    """Primitive integer vectors (both signs) with 0 < ||a||^2 < radius_sq."""
    reach = int(math.floor(math.sqrt(max(radius_sq, 0.0))))
    if reach < 1:
        return np.empty(0), np.empty((0, n_dim), dtype=np.int64)
    side = 2 * reach + 1
    if side**n_dim > 4 * max_points:
        raise EnumerationLimitError(
            f"candidate grid of {side ** n_dim} points exceeds the enumeration budget"
        )
    axes = [np.arange(-reach, reach + 1)] * n_dim
    coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n_dim)
    norm_sq = np.einsum("ij,ij->i", coords, coords).astype(float)
    mask = (norm_sq > 0) & (norm_sq < radius_sq)
    mask &= np.gcd.reduce(np.abs(coords), axis=1) == 1
    coords = coords[mask]
    if coords.shape[0] > max_points:
        raise EnumerationLimitError(f"{coords.shape[0]} lattice vectors exceed the budget")
    return norm_sq[mask], coords


def ifsic_wc_outage_upper_lattice(
    c: float,
    delta_c: float,
    n_dim: int = 4,
    d_grid: int = 64,
    max_points: int = 10_000_000,
) -> BoundValue:
    """Tighter worst-case IF-SIC outage upper bound from a sum over short
    primitive integer vectors, maximized over the dominant channel mode
    d_max on [2^(c/2), 2^c].

    Each vector a with 0 < ||a|| < sqrt(gamma d_max), gamma = 2^(-(c+dc)/2),
    contributes 2 pi^2 2^(-3(c+dc)/4) / (pi^2 ||a||^3 2^(-c) sqrt(d_max)).
    """
    if delta_c <= 0.0:
        raise ValueError("delta_c must be positive")
    if n_dim < 1 or d_grid < 1:
        raise ValueError("n_dim and d_grid must be positive")
    gamma = 2.0 ** (-(c + delta_c) / 2.0)
    d_values = np.geomspace(2.0 ** (c / 2.0), 2.0**c, d_grid)
    try:
        norm_sq, _ = _primitive_vectors(n_dim, gamma * d_values[-1], max_points)
    except EnumerationLimitError as exc:
        exc.partial = BoundValue(value=1.0, method="closed-form", abs_error=1.0)
        raise
    if norm_sq.size == 0:
        return BoundValue(value=0.0, method="closed-form")
    order = np.argsort(norm_sq, kind="stable")
    norm_sq = norm_sq[order]
    inv_norm_cubed = np.cumsum(norm_sq ** -1.5)
    numer = 2.0 * math.pi**2 * 2.0 ** (-0.75 * (c + delta_c))
    best = 0.0
    for d in d_values:
        count = int(np.searchsorted(norm_sq, gamma * d, side="left"))
        if count == 0:
            continue
        total = inv_norm_cubed[count - 1]
        best = max(best, numer * total / (math.pi**2 * 2.0**-c * math.sqrt(d)))
    return BoundValue(value=min(best, 1.0), method="closed-form")


def ml_outage_at_rho2(c: float, r: float, rho2: float) -> BoundValue:
    """Exact scheme outage of joint-ML decoding at a fixed weak mode:
    2 max(2^(r/2) - 1 - rho2, 0) / (2^c / (1 + rho2) - 1 - rho2)."""
    if not 0.0 <= rho2 <= rho2_max(c) + 1e-9:
        raise ValueError("rho2 outside the admissible range")
    if not 0.0 <= r <= c:
        raise ValueError("rate must lie in [0, c]")
    numer = 2.0 ** (r / 2.0) - 1.0 - rho2
    if numer <= 0.0:
        return BoundValue(value=0.0, method="closed-form")
    denom = 2.0**c / (1.0 + rho2) - 1.0 - rho2
    if denom <= numer:  # includes the rho1 == rho2 endpoint where denom -> 0
        return BoundValue(value=1.0, method="closed-form")
    return BoundValue(value=min(2.0 * numer / denom, 1.0), method="closed-form")


def ml_worst_rho2(c: float, r: float) -> float:
    """The weak-mode value maximizing ml_outage_at_rho2 for r < c."""
    if r >= c:
        raise ValueError("requires a positive gap r < c")
    value = 2.0 ** (-r / 2.0 - 1.0) * (
        2.0 ** (c + 1.0)
        - 2.0 ** (r / 2.0 + 1.0)
        - 2.0 * math.sqrt(2.0 ** (2.0 * c) - 2.0 ** (c + r))
    )
    return float(min(max(value, 0.0), rho2_max(c)))


def ml_wc_outage_exact(delta_c: float) -> BoundValue:
    """Exact worst-case ML scheme outage 1 - sqrt(1 - 2^(-delta_c))."""
    if delta_c < 0.0:
        raise ValueError("delta_c must be nonnegative")
    return BoundValue(value=1.0 - math.sqrt(1.0 - 2.0**-delta_c), method="closed-form")


@lru_cache(maxsize=16)
def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def _st_term(c, r, t, k, rho2, nodes):
    """Outage probability of the leading size-k column subset under CUE
    space-time precoding, by tensor quadrature of the Jacobi weight.

    Only implemented for at most two free eigenvalues; the caller falls back
    to Monte Carlo beyond that.
    """
    rho1 = 2.0**c / (1.0 + rho2) - 1.0
    delta = rho1 - rho2
    if k <= t:
        n_free, expo, thr_log2 = k, t - k, r * k / 2.0
    else:
        # k - t eigenvalue pairs are pinned at (0, 1) and together contribute
        # (k - t) * c bits, which comes off the subset's rate budget
        n_free, expo, thr_log2 = 2 * t - k, k - t, r * k / 2.0 - (k - t) * c
    if thr_log2 <= 0.0:
        return 0.0
    thr = 2.0**thr_log2
    if delta <= 1e-12:
        # all modes equal: the subset capacity is deterministic
        return 1.0 if n_free * math.log2(1.0 + rho2) < thr_log2 else 0.0
    bound = (thr - 1.0 - rho2) / delta
    if bound <= 0.0:
        return 0.0
    log_kappa = selberg_log_kappa(JacobiSpec(t, t, n_free))

    def weight(lam):
        if expo == 0:
            return np.ones_like(lam)
        return (lam * (1.0 - lam)) ** expo

    x, w = _gl_nodes(nodes)
    if n_free == 1:
        hi = min(bound, 1.0)
        lam = x * hi
        total = hi * np.sum(w * weight(lam))
        return math.exp(-log_kappa) * total
    if n_free == 2:
        outer_hi = min((thr / (1.0 + rho2) - 1.0 - rho2) / delta, 1.0)
        if outer_hi <= 0.0:
            return 0.0
        lam1 = x * outer_hi
        f1 = 1.0 + rho2 + delta * lam1
        inner_hi = np.minimum((thr / f1 - 1.0 - rho2) / delta, 1.0)
        inner_hi = np.clip(inner_hi, 0.0, None)
        lam2 = x[None, :] * inner_hi[:, None]
        vand = (lam2 - lam1[:, None]) ** 2
        integrand = weight(lam1)[:, None] * weight(lam2) * vand
        inner = inner_hi * np.sum(w[None, :] * integrand, axis=1)
        total = outer_hi * np.sum(w * inner)
        return math.exp(-log_kappa) * total
    return None  # quadrature not available at this dimension


def _st_term_mc(c, r, t, k, rho2_values, cfg: QuadConfig):
    """Monte Carlo version of _st_term, vectorized over a rho2 sweep with a
    common sample set."""
    if k <= t:
        n_free, thr_log2 = k, lambda rho2: r * k / 2.0
    else:
        n_free, thr_log2 = 2 * t - k, lambda rho2: r * k / 2.0 - (k - t) * c
    spec = JacobiSpec(t, t, n_free)
    draws = np.array(
        [sample_jacobi(spec, RngSeed(cfg.mc_seed, i)) for i in range(cfg.mc_samples)]
    )
    out = np.empty((len(rho2_values), 2))
    for i, rho2 in enumerate(rho2_values):
        rho1 = 2.0**c / (1.0 + rho2) - 1.0
        log_prod = np.sum(np.log2(1.0 + rho2 + (rho1 - rho2) * draws), axis=1)
        hits = log_prod <= thr_log2(rho2)
        p = float(np.mean(hits))
        out[i] = (p, math.sqrt(p * (1.0 - p) / cfg.mc_samples))
    return out


def _st_outage_at(c, r, t, rho2, nodes):
    """max over subset sizes k = 1..2t-1 of the leading-subset outage.

    In the unextended case the two single-column outage events are disjoint,
    so the k=1 term is doubled there; no such identity is available for t>1.
    """
    best = 0.0
    for k in range(1, 2 * t):
        term = _st_term(c, r, t, k, rho2, nodes)
        if term is None:
            return None
        if t == 1 and k == 1:
            term *= 2.0
        best = max(best, min(term, 1.0))
    return best


def st_wc_outage_lower(c: float, r: float, t: int, cfg: QuadConfig = QuadConfig()) -> BoundValue:
    """Lower bound on worst-case scheme outage under CUE precoding over t
    time extensions, maximized over the weak mode and the subset size.

    Subset sizes with at most two free eigenvalues are integrated by
    Gauss-Legendre quadrature with the region boundary inverted analytically;
    larger sizes fall back to Monte Carlo over the Jacobi sampler.  The full
    subset k = 2t is outage-free for r <= c and certain for r > c, and is
    handled separately from the integrals.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0.0 <= r:
        raise ValueError("rate must be nonnegative")
    if r > c:
        return BoundValue(value=1.0, method="closed-form")
    if r == 0.0:
        return BoundValue(value=0.0, method="quadrature")
    grid = rho2_grid(c, cfg.rho2_points)

    values = [_st_outage_at(c, r, t, rho2, cfg.nodes) for rho2 in grid]
    if any(v is None for v in values):
        return _st_lower_mc(c, r, t, grid, cfg)
    values = np.asarray(values, dtype=float)
    idx = int(np.argmax(values))
    best_rho2, best = grid[idx], values[idx]

    if cfg.refine and 0 < idx < len(grid) - 1:
        lo, hi = grid[idx - 1], grid[idx + 1]
        x1 = hi - GOLDEN * (hi - lo)
        x2 = lo + GOLDEN * (hi - lo)
        f1 = _st_outage_at(c, r, t, x1, cfg.nodes)
        f2 = _st_outage_at(c, r, t, x2, cfg.nodes)
        for _ in range(60):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + GOLDEN * (hi - lo)
                f2 = _st_outage_at(c, r, t, x2, cfg.nodes)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - GOLDEN * (hi - lo)
                f1 = _st_outage_at(c, r, t, x1, cfg.nodes)
        for x, f in ((x1, f1), (x2, f2)):
            if f > best:
                best_rho2, best = x, f

    coarse = _st_outage_at(c, r, t, best_rho2, max(cfg.nodes // 2, 8))
    abs_error = max(abs(best - coarse), 1e-9)
    return BoundValue(value=min(best, 1.0), method="quadrature", abs_error=abs_error)


def _st_lower_mc(c, r, t, grid, cfg: QuadConfig) -> BoundValue:
    best = (0.0, 0.0)
    for k in range(1, 2 * t):
        table = _st_term_mc(c, r, t, k, grid, cfg)
        mult = 2.0 if (t == 1 and k == 1) else 1.0
        i = int(np.argmax(table[:, 0]))
        candidate = (min(mult * table[i, 0], 1.0), mult * table[i, 1])
        if candidate[0] > best[0]:
            best = candidate
    return BoundValue(value=best[0], method="monte-carlo", abs_error=best[1])


def mac_subset_outage(k: int, n_t: int, r: float, c: float) -> BoundValue:
    """Conditional outage of a size-k user subset of an n_t-user Rayleigh MAC
    given sum capacity c: the Beta(k, n_t - k) law of the normalized partial
    channel power evaluated at (2^(r k / n_t) - 1) / (2^c - 1)."""
    if not 1 <= k <= n_t:
        raise ValueError("subset size must lie in [1, n_t]")
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    if k == n_t:
        return BoundValue(value=0.0 if r <= c else 1.0, method="closed-form")
    if r == 0.0:
        return BoundValue(value=0.0, method="closed-form")
    x = (2.0 ** (r * k / n_t) - 1.0) / (2.0**c - 1.0)
    x = min(max(x, 0.0), 1.0)
    return BoundValue(value=float(betainc(k, n_t - k, x)), method="closed-form")


def mac2_sym_outage_exact(c: float, r: float) -> BoundValue:
    """Exact conditional symmetric-rate outage of the two-user Rayleigh MAC:
    2 (2^(r/2) - 1) / (2^c - 1)."""
    if not 0.0 <= r <= c:
        raise ValueError("rate must lie in [0, c]")
    value = 2.0 * (2.0 ** (r / 2.0) - 1.0) / (2.0**c - 1.0)
    return BoundValue(value=min(value, 1.0), method="closed-form")


def mac_sym_outage_bounds(n_t: int, r: float, c: float):
    """Lower and upper bounds on the n_t-user conditional symmetric-rate
    outage: the largest subset term and its union-bound sum."""
    if n_t < 2:
        raise ValueError("needs at least two users")
    terms = [mac_subset_outage(k, n_t, r, c).value for k in range(1, n_t + 1)]
    lower = max(terms)
    upper = sum(comb(n_t, k, exact=True) * p for k, p in enumerate(terms, start=1))
    return (
        BoundValue(value=min(lower, 1.0), method="closed-form"),
        BoundValue(value=min(upper, 1.0), method="closed-form"),
    )
