"""Small dense linear-algebra primitives: Cholesky, real embedding of complex
channels, Kronecker time extension, and white-input (log-det) capacity.

Matrices are plain numpy arrays; everything here is sized for channel
dimensions of at most 16.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DefinitenessError

# Pivots at or below this are treated as numerically singular.
CHOLESKY_PIVOT_MIN = 1e-12


def cholesky_lower(m: np.ndarray) -> np.ndarray:
    """Lower-triangular L with m = L @ L.T for a symmetric positive-definite m.

    Raises DefinitenessError if the input is not symmetric to 1e-10 (relative)
    or any pivot falls at or below CHOLESKY_PIVOT_MIN.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise DefinitenessError("matrix is not symmetric")
    try:
        ell = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"matrix is not positive definite: {exc}") from exc
    if (ell.diagonal() ** 2).min() <= CHOLESKY_PIVOT_MIN:
        raise DefinitenessError("pivot at or below threshold; treating as singular")
    return ell


def complex_to_real(h: np.ndarray) -> np.ndarray:
    """Real embedding [[Re, -Im], [Im, Re]] of a complex matrix.

    det(I + embed(H).T @ embed(H)) equals det(I + H^H H)^2, so log-det
    capacities computed on the embedding come out doubled.
    """
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def real_to_complex(m: np.ndarray) -> np.ndarray:
    """Invert complex_to_real; valid only for maps of that block structure."""
    m = np.asarray(m, dtype=float)
    rows, cols = m.shape
    if rows % 2 or cols % 2:
        raise ValueError("real embedding must have even dimensions")
    r2, c2 = rows // 2, cols // 2
    re = m[:r2, :c2]
    im = m[r2:, :c2]
    if np.abs(m[:r2, c2:] + im).max() > 1e-9 or np.abs(m[r2:, c2:] - re).max() > 1e-9:
        raise ValueError("matrix does not carry the complex embedding structure")
    return re + 1j * im


def time_extend(h: np.ndarray, t: int) -> np.ndarray:
    """Block-diagonal channel acting on t consecutive channel uses."""
    if t < 1:
        raise ValueError("t must be >= 1")
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    return np.kron(np.eye(t), h)


def wi_capacity(h: np.ndarray) -> float:
    """Mutual information in bits/complex use under an isotropic Gaussian input.

    log2 det(I + H^H H), evaluated on the smaller Gram side.
    """
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    nr, nt = h.shape
    gram = h.conj().T @ h if nt <= nr else h @ h.conj().T
    eig = np.linalg.eigvalsh(gram)
    return float(np.sum(np.log2(1.0 + np.clip(eig, 0.0, None))))


def wi_capacity_real(h_real: np.ndarray) -> float:
    """log2 det(I + H^T H) / 2 for a real-embedded channel (bits/complex use)."""
    h_real = np.asarray(h_real, dtype=float)
    gram = h_real.T @ h_real if h_real.shape[1] <= h_real.shape[0] else h_real @ h_real.T
    eig = np.linalg.eigvalsh(gram)
    return float(np.sum(np.log2(1.0 + np.clip(eig, 0.0, None))) / 2.0)


@dataclass(frozen=True)
class CompoundChannel:
    """Diagonal parameterization of the compound class with capacity C.

    ``rho`` holds the per-mode SNRs in descending order; their capacity sum
    log2(1 + rho_i) must equal ``capacity_bits``.
    """

    n_t: int
    capacity_bits: float
    rho: tuple = field(default=())

    def __post_init__(self):
        if self.n_t < 1:
            raise ValueError("n_t must be positive")
        if len(self.rho) != self.n_t:
            raise ValueError("rho must have n_t entries")
        rho = np.asarray(self.rho, dtype=float)
        if (rho < 0).any():
            raise ValueError("per-mode SNRs must be nonnegative")
        if np.any(np.diff(rho) > 1e-12):
            raise ValueError("rho must be in descending order")
        total = float(np.sum(np.log2(1.0 + rho)))
        if abs(total - self.capacity_bits) > 1e-9:
            raise ValueError(
                f"sum log2(1+rho) = {total} does not match capacity {self.capacity_bits}"
            )

    @classmethod
    def two_modes(cls, capacity_bits: float, rho2: float) -> "CompoundChannel":
        """n_t=2 channel with the weak mode rho2 given and rho1 derived."""
        rho2_max = 2.0 ** (capacity_bits / 2.0) - 1.0
        if not 0.0 <= rho2 <= rho2_max + 1e-9:
            raise ValueError(f"rho2 must lie in [0, {rho2_max}]")
        rho2 = min(rho2, rho2_max)
        rho1 = 2.0**capacity_bits / (1.0 + rho2) - 1.0
        return cls(n_t=2, capacity_bits=capacity_bits, rho=(rho1, rho2))

    @classmethod
    def equal_tail(cls, n_t: int, capacity_bits: float, rho_tail: float) -> "CompoundChannel":
        """Modes 2..n_t share rho_tail; mode 1 absorbs the remaining capacity."""
        used = (n_t - 1) * np.log2(1.0 + rho_tail)
        if used > capacity_bits + 1e-9:
            raise ValueError("tail SNR exceeds the capacity budget")
        rho1 = 2.0 ** (capacity_bits - used) - 1.0
        if rho1 < rho_tail - 1e-9:
            raise ValueError("tail SNR violates the descending-mode convention")
        return cls(n_t=n_t, capacity_bits=capacity_bits, rho=(max(rho1, rho_tail),) + (rho_tail,) * (n_t - 1))

    def diagonal(self) -> np.ndarray:
        """The n_t x n_t complex channel diag(sqrt(rho_i))."""
        return np.diag(np.sqrt(np.asarray(self.rho, dtype=float))).astype(complex)

    def diagonal_extended(self, t: int) -> np.ndarray:
        """Mode-major time extension diag(sqrt(rho_1) I_t, ..., sqrt(rho_n) I_t)."""
        return np.kron(self.diagonal(), np.eye(t))
