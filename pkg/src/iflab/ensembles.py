"""Random-matrix ensembles: Haar (CUE) unitaries, the Jacobi eigenvalue law of
unitary submatrices, and capacity-conditioned channel draws on the complex
sphere.

All samplers are pure functions of their parameters and an RngSeed, so a
(seed, stream_id) pair always reproduces the identical output and distinct
pairs give independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln


@dataclass(frozen=True)
class RngSeed:
    """Seed plus stream index; streams are independent and reproducible."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def stream(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.seed, stream_id)


@dataclass(frozen=True)
class JacobiSpec:
    """Parameters (m1, m2, n) of the eigenvalue ensemble of A(A+B)^-1."""

    m1: int
    m2: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m1 < self.n or self.m2 < self.n:
            raise ValueError("m1 and m2 must both be >= n")


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return z / math.sqrt(2.0)


def sample_cue(n: int, rng: RngSeed) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a Ginibre matrix.

    Each column of Q is rotated by conj(r_jj)/|r_jj|; without that phase fix
    the QR output is not Haar.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    g = rng.generator()
    q, r = np.linalg.qr(_ginibre(g, n, n))
    d = np.diagonal(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d.conj() / np.abs(d))


def entry_sq_magnitude_pdf(mu: float, m: int) -> float:
    """Density of |U_{ij}|^2 for an m x m CUE matrix: (m-1)(1-mu)^(m-2)."""
    if m < 2:
        raise ValueError("the entry law requires dimension m >= 2")
    if not 0.0 <= mu <= 1.0:
        return 0.0
    return float((m - 1) * (1.0 - mu) ** (m - 2))


def selberg_log_kappa(spec: JacobiSpec) -> float:
    """log of the Selberg normalizing constant for the Jacobi weight.

    kappa = prod_j Gamma(m1-n+j) Gamma(m2-n+j) Gamma(1+j) /
                   (Gamma(2) Gamma(m1+m2-n+j)),
    which normalizes the unordered-eigenvalue density over [0,1]^n.
    """
    m1, m2, n = spec.m1, spec.m2, spec.n
    j = np.arange(1, n + 1, dtype=float)
    log_k = np.sum(
        gammaln(m1 - n + j)
        + gammaln(m2 - n + j)
        + gammaln(1 + j)
        - gammaln(2.0)
        - gammaln(m1 + m2 - n + j)
    )
    if not np.isfinite(log_k):
        raise OverflowError("Selberg constant is not finite for these parameters")
    return float(log_k)


def selberg_kappa(spec: JacobiSpec) -> float:
    """Selberg normalizing constant, exponentiated from log space."""
    value = math.exp(selberg_log_kappa(spec))
    if not (value > 0 and math.isfinite(value)):
        raise OverflowError("Selberg constant overflowed")
    return value


def jacobi_logpdf(lam: np.ndarray, spec: JacobiSpec) -> float:
    """Log-density of the ordered eigenvalues 0 <= lam_1 <= ... <= lam_n <= 1.

    The ordered density carries an extra n! over the Selberg constant, which
    normalizes the unordered product form on the full cube.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (spec.n,):
        raise ValueError(f"expected {spec.n} eigenvalues, got shape {lam.shape}")
    if (lam < 0).any() or (lam > 1).any():
        raise ValueError("eigenvalues must lie in [0, 1]")
    if np.any(np.diff(lam) < 0):
        raise ValueError("eigenvalues must be in ascending order")
    a = spec.m1 - spec.n
    b = spec.m2 - spec.n
    with np.errstate(divide="ignore"):
        log_w = np.sum(a * np.log(lam) + b * np.log1p(-lam)) if (a or b) else 0.0
        diffs = lam[None, :] - lam[:, None]
        iu = np.triu_indices(spec.n, k=1)
        log_vand = 2.0 * np.sum(np.log(np.abs(diffs[iu]))) if spec.n > 1 else 0.0
    return float(math.lgamma(spec.n + 1) - selberg_log_kappa(spec) + log_w + log_vand)


def sample_jacobi(spec: JacobiSpec, rng: RngSeed) -> np.ndarray:
    """Ascending eigenvalues of A(A+B)^-1 with A ~ W(m1, n), B ~ W(m2, n)."""
    g = rng.generator()
    ga = _ginibre(g, spec.m1, spec.n)
    gb = _ginibre(g, spec.m2, spec.n)
    a = ga.conj().T @ ga
    b = gb.conj().T @ gb
    # generalized problem A v = lam (A+B) v keeps eigenvalues inside [0,1]
    lam = eigh(a, a + b, eigvals_only=True)
    return np.clip(lam, 0.0, 1.0)


def submatrix_singular_spec(total_dim: int, rows: int, cols: int) -> JacobiSpec:
    """Jacobi law of the squared singular values of a rows x cols block of a
    total_dim x total_dim Haar unitary, with total_dim = 2 * rows.

    For cols <= rows the law applies to the block's values directly; for
    cols > rows it governs the 2*rows - cols non-degenerate values, the rest
    being pinned at 0 and 1.
    """
    if total_dim != 2 * rows:
        raise ValueError("block must span half the rows of the unitary")
    if not 1 <= cols <= total_dim:
        raise ValueError(f"column count must lie in [1, {total_dim}]")
    free = min(cols, total_dim - cols)
    if free == 0:
        raise ValueError("cols == total_dim leaves no free singular values")
    return JacobiSpec(m1=rows, m2=rows, n=free)


def sample_sphere_given_c(n_t: int, c: float, rng: RngSeed) -> np.ndarray:
    """Channel vector uniform on the complex sphere of radius sqrt(2^c - 1).

    This is the conditional law of an i.i.d. complex Gaussian vector given
    that its sum capacity log2(1 + ||h||^2) equals c.
    """
    if c < 0:
        raise ValueError("capacity must be nonnegative")
    g = rng.generator()
    v = _ginibre(g, 1, n_t)[0]
    norm = np.linalg.norm(v)
    if norm < 1e-300:
        v = np.ones(n_t, dtype=complex)
        norm = math.sqrt(float(n_t))
    radius = math.sqrt(2.0**c - 1.0)
    return v * (radius / norm)
