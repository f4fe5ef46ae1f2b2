"""Achievable rates of integer-forcing receivers and the joint-ML benchmark.

The IF-SIC rate for a real channel H with n streams is
    (n / 2T) * max_A min_m log2(1 / l_mm^2),
where A (I + H^T H)^-1 A^T = L L^T, A runs over full-rank integer matrices,
and T is the number of time extensions folded into H.  The max over A is
realized by LLL reduction (optionally checked against a bounded exhaustive
enumeration), and negative rates are floored at zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SearchFailureError
from .linalg import cholesky_lower

LLL_MAX_ITERATIONS = 100_000
EXHAUSTIVE_MAX_DIM = 4
_ENUM_MAX_POINTS = 2_000_000


@dataclass(frozen=True)
class SearchConfig:
    """How the integer matrix A is searched.

    method: "lll" (reduce + sort rows), "lll+permutations" (additionally try
    every row order when the dimension is at most 4), or "exhaustive"
    (bounded sphere enumeration; dimensions above 4 are refused).
    """

    method: str = "lll+permutations"
    lll_delta: float = 0.99
    enum_radius_sq: float | None = None

    def __post_init__(self):
        if self.method not in ("lll", "lll+permutations", "exhaustive"):
            raise ValueError(f"unknown search method {self.method!r}")
        if not 0.25 < self.lll_delta <= 1.0:
            raise ValueError("lll_delta must lie in (0.25, 1]")
        if self.enum_radius_sq is not None and self.enum_radius_sq <= 0:
            raise ValueError("enum_radius_sq must be positive")


@dataclass(frozen=True)
class IfRateResult:
    """Rate in bits/complex use plus the integer matrix and per-stream noise
    standard deviations (Cholesky diagonals for SIC, sqrt row norms for plain
    IF) that produced it."""

    rate_bits: float
    a_matrix: np.ndarray
    ell_diag: np.ndarray


def if_gram(h_real: np.ndarray) -> np.ndarray:
    """Effective-noise Gram matrix K = (I + H^T H)^-1 of the real channel."""
    h_real = np.asarray(h_real, dtype=float)
    if not np.isfinite(h_real).all():
        raise ValueError("channel entries must be finite")
    n = h_real.shape[1]
    k = np.linalg.inv(np.eye(n) + h_real.T @ h_real)
    return 0.5 * (k + k.T)


def lll_reduce(basis: np.ndarray, delta: float = 0.99):
    """LLL-reduce the rows of ``basis``; returns (reduced, u) with
    reduced = u @ basis and u unimodular integer.

    Maintains the Gram-Schmidt data incrementally across swaps.  Raises
    SearchFailureError if the sweep does not terminate within
    LLL_MAX_ITERATIONS.
    """
    b = [list(map(float, row)) for row in np.asarray(basis, dtype=float)]
    n = len(b)
    dim = len(b[0])
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    mu = [[0.0] * n for _ in range(n)]
    norm_sq = [0.0] * n
    star = [list(b[0])] + [[0.0] * dim for _ in range(n - 1)]
    norm_sq[0] = sum(x * x for x in b[0])

    def gram_schmidt_row(i):
        row = list(b[i])
        for j in range(i):
            if norm_sq[j] > 1e-300:
                mu[i][j] = sum(b[i][t] * star[j][t] for t in range(dim)) / norm_sq[j]
            else:
                mu[i][j] = 0.0
            mij = mu[i][j]
            sj = star[j]
            for t in range(dim):
                row[t] -= mij * sj[t]
        star[i] = row
        norm_sq[i] = sum(x * x for x in row)

    def size_reduce(k, j):
        if abs(mu[k][j]) > 0.5:
            r = round(mu[k][j])
            bk, bj = b[k], b[j]
            uk, uj = u[k], u[j]
            for t in range(dim):
                bk[t] -= r * bj[t]
            for t in range(n):
                uk[t] -= r * uj[t]
            muk, muj = mu[k], mu[j]
            for t in range(j):
                muk[t] -= r * muj[t]
            muk[j] -= r

    def swap_rows(k, kmax):
        b[k - 1], b[k] = b[k], b[k - 1]
        u[k - 1], u[k] = u[k], u[k - 1]
        for j in range(k - 1):
            mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
        mubar = mu[k][k - 1]
        bbar_norm = norm_sq[k] + mubar * mubar * norm_sq[k - 1]
        if bbar_norm < 1e-300:
            norm_sq[k], norm_sq[k - 1] = norm_sq[k - 1], norm_sq[k]
            star[k], star[k - 1] = star[k - 1], star[k]
            for i in range(k + 1, kmax + 1):
                mu[i][k], mu[i][k - 1] = mu[i][k - 1], mu[i][k]
        elif norm_sq[k] < 1e-300 and mubar != 0.0:
            norm_sq[k - 1] = bbar_norm
            star[k - 1] = [mubar * x for x in star[k - 1]]
            mu[k][k - 1] = 1.0 / mubar
            for i in range(k + 1, kmax + 1):
                mu[i][k - 1] /= mubar
        else:
            t = norm_sq[k - 1] / bbar_norm
            mu[k][k - 1] = mubar * t
            old_prev = list(star[k - 1])
            ratio = norm_sq[k] / bbar_norm
            mkk = mu[k][k - 1]
            for x in range(dim):
                sk = star[k][x]
                star[k - 1][x] = sk + mubar * old_prev[x]
                star[k][x] = -mkk * sk + ratio * old_prev[x]
            norm_sq[k] = norm_sq[k] * t
            norm_sq[k - 1] = bbar_norm
            for i in range(k + 1, kmax + 1):
                tt = mu[i][k]
                mu[i][k] = mu[i][k - 1] - mubar * tt
                mu[i][k - 1] = tt + mkk * mu[i][k]

    k = 1
    kmax = 0
    iterations = 0
    while k < n:
        iterations += 1
        if iterations > LLL_MAX_ITERATIONS:
            raise SearchFailureError("LLL did not terminate within its iteration cap")
        if k > kmax:
            kmax = k
            gram_schmidt_row(k)
        size_reduce(k, k - 1)
        if norm_sq[k] < (delta - mu[k][k - 1] ** 2) * norm_sq[k - 1]:
            swap_rows(k, kmax)
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
    return np.array(b, dtype=float), np.array(u, dtype=np.int64)


def _enumerate_in_ellipsoid(k_gram: np.ndarray, radius_sq: float) -> list:
    """All nonzero integer vectors a with a K a^T <= radius_sq (both signs),
    by depth-first enumeration on the Cholesky factor of K."""
    ell = cholesky_lower(k_gram)
    upper = ell.T  # a K a^T = ||upper @ a||^2
    n = upper.shape[0]
    found = []

    def descend(level, partial, residual):
        # partial[j] for j > level already fixed; residual = remaining budget
        if len(found) > _ENUM_MAX_POINTS:
            raise SearchFailureError("sphere enumeration exceeded its point budget")
        shift = sum(upper[level, j] * partial[j] for j in range(level + 1, n))
        half_width = math.sqrt(max(residual, 0.0)) if residual > 0 else 0.0
        diag = upper[level, level]
        lo = math.ceil((-half_width - shift) / diag - 1e-12)
        hi = math.floor((half_width - shift) / diag + 1e-12)
        for a in range(lo, hi + 1):
            y = diag * a + shift
            rem = residual - y * y
            if rem < -1e-12:
                continue
            partial[level] = a
            if level == 0:
                if any(partial):
                    found.append(list(partial))
            else:
                descend(level - 1, partial, rem)
        partial[level] = 0

    descend(n - 1, [0] * n, radius_sq * (1.0 + 1e-12))
    return found


def _shortest_independent_set(k_gram: np.ndarray, radius_sq: float) -> np.ndarray:
    """Greedy selection of n independent integer vectors of ascending
    quadratic norm among all candidates inside the given ellipsoid."""
    n = k_gram.shape[0]
    candidates = _enumerate_in_ellipsoid(k_gram, radius_sq)
    if not candidates:
        raise SearchFailureError("no lattice points inside the enumeration radius")
    cand = np.array(candidates, dtype=np.int64)
    norms = np.einsum("ij,jk,ik->i", cand.astype(float), k_gram, cand.astype(float))
    order = np.argsort(norms, kind="stable")
    chosen: list = []
    basis_float: list = []
    for idx in order:
        v = cand[idx]
        w = v.astype(float)
        for u in basis_float:
            w = w - (w @ u) * u
        if np.linalg.norm(w) > 1e-9 * max(np.linalg.norm(v), 1.0):
            chosen.append(v)
            basis_float.append(w / np.linalg.norm(w))
            if len(chosen) == n:
                break
    if len(chosen) < n:
        raise SearchFailureError("enumeration radius too small for a full basis")
    return np.array(chosen, dtype=np.int64)


def search_integer_matrix(k_gram: np.ndarray, cfg: SearchConfig = SearchConfig()) -> np.ndarray:
    """Full-rank integer matrix whose rows are short under the quadratic form
    k_gram: an LLL-reduced basis, or the greedy shortest independent set for
    the exhaustive method."""
    k_gram = np.asarray(k_gram, dtype=float)
    n = k_gram.shape[0]
    basis = cholesky_lower(k_gram)
    _, u = lll_reduce(basis, cfg.lll_delta)
    if cfg.method != "exhaustive":
        return u
    if n > EXHAUSTIVE_MAX_DIM:
        raise ValueError(f"exhaustive search is limited to dimension {EXHAUSTIVE_MAX_DIM}")
    radius_sq = cfg.enum_radius_sq
    if radius_sq is None:
        uf = u.astype(float)
        radius_sq = float(np.einsum("ij,jk,ik->i", uf, k_gram, uf).max())
    return _shortest_independent_set(k_gram, radius_sq)


def _best_sic_floor(m: np.ndarray, permute: bool) -> tuple:
    """Largest achievable min-pivot over row orders of the SPD matrix m.

    Returns (max over orders of min_m l_mm^2 ... as the diagonal vector of the
    winning order's Cholesky factor).  Row orders tried: ascending-diagonal
    sort, plus every permutation when the dimension is at most 4.
    """
    n = m.shape[0]
    orders = [tuple(np.argsort(np.diagonal(m), kind="stable"))]
    if permute and n <= 4:
        orders = list(itertools.permutations(range(n)))
    stack = np.empty((len(orders), n, n))
    for i, p in enumerate(orders):
        idx = np.asarray(p)
        stack[i] = m[np.ix_(idx, idx)]
    ells = np.linalg.cholesky(stack)
    diags = np.einsum("kii->ki", ells)
    worst = diags.max(axis=1)  # SIC bottleneck is the largest l_mm
    best = int(np.argmin(worst))
    return diags[best], np.asarray(orders[best])


def _sic_rate_from_matrix(a: np.ndarray, k_gram: np.ndarray, streams: int, t: int, permute: bool):
    af = a.astype(float)
    m = af @ k_gram @ af.T
    m = 0.5 * (m + m.T)
    diag, order = _best_sic_floor(m, permute)
    worst = diag.max()
    raw = streams * 0.5 * np.log2(1.0 / worst**2) / t
    return max(raw, 0.0), a[order], diag


def if_sic_rate(h_real: np.ndarray, t: int = 1, cfg: SearchConfig = SearchConfig()) -> IfRateResult:
    """Achievable IF-SIC rate of a real-embedded channel over t extensions."""
    h_real = np.asarray(h_real, dtype=float)
    if h_real.shape[1] % 2:
        raise ValueError("real channel must have an even number of streams")
    k = if_gram(h_real)
    a = search_integer_matrix(k, cfg)
    permute = cfg.method != "lll"
    rate, a_ordered, diag = _sic_rate_from_matrix(a, k, h_real.shape[1], t, permute)
    return IfRateResult(rate_bits=rate, a_matrix=a_ordered, ell_diag=diag)


def if_plain_rate(h_real: np.ndarray, t: int = 1, cfg: SearchConfig = SearchConfig()) -> IfRateResult:
    """Achievable rate of plain integer forcing: the per-stream noise is the
    full row quadratic norm a_m K a_m^T, with no cancellation."""
    h_real = np.asarray(h_real, dtype=float)
    if h_real.shape[1] % 2:
        raise ValueError("real channel must have an even number of streams")
    k = if_gram(h_real)
    a = search_integer_matrix(k, cfg)
    af = a.astype(float)
    row_norms = np.einsum("ij,jk,ik->i", af, k, af)
    raw = h_real.shape[1] * 0.5 * np.log2(1.0 / row_norms.max()) / t
    return IfRateResult(
        rate_bits=max(raw, 0.0), a_matrix=a, ell_diag=np.sqrt(row_norms)
    )


def sic_rate_for_matrix(h_real: np.ndarray, a: np.ndarray, t: int = 1) -> float:
    """IF-SIC rate for a fixed integer matrix in its given row order."""
    h_real = np.asarray(h_real, dtype=float)
    k = if_gram(h_real)
    af = np.asarray(a, dtype=float)
    m = af @ k @ af.T
    ell = np.linalg.cholesky(0.5 * (m + m.T))
    worst = ell.diagonal().max()
    return max(h_real.shape[1] * 0.5 * np.log2(1.0 / worst**2) / t, 0.0)


def ml_mac_rate(h_eff: np.ndarray, n_streams: int, t: int = 1) -> float:
    """Joint-ML equal-rate benchmark of a multiple-access effective channel.

    (1/t) * min over nonempty column subsets S of
        (cols/|S|) * log2 det(I + H_S H_S^H).
    """
    h_eff = np.atleast_2d(np.asarray(h_eff, dtype=complex))
    cols = h_eff.shape[1]
    if n_streams * t != cols:
        raise ValueError("column count must equal n_streams * t")
    return float(_ml_rates_batch(h_eff[None, :, :], t)[0])


def _ml_rates_batch(h_stack: np.ndarray, t: int) -> np.ndarray:
    """Vectorized ml_mac_rate over a stack of effective channels."""
    h_stack = np.asarray(h_stack, dtype=complex)
    cols = h_stack.shape[2]
    best = np.full(h_stack.shape[0], np.inf)
    for size in range(1, cols + 1):
        weight = cols / size
        for subset in itertools.combinations(range(cols), size):
            sub = h_stack[:, :, subset]
            gram = np.einsum("nri,nrj->nij", sub.conj(), sub)
            gram = gram + np.eye(size)
            _, logdet = np.linalg.slogdet(gram)
            rate = weight * logdet / math.log(2.0)
            np.minimum(best, rate, out=best)
    return np.clip(best / t, 0.0, None)
