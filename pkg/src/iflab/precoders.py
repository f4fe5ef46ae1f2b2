"""Space and space-time precoding maps, all carried as real matrices with
orthonormal columns acting on real symbol vectors.

The real carrier is needed because Alamouti-style conjugation is real-linear
but not complex-linear; complex-linear precoders additionally keep their
complex form in ``cmap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import RngSeed, sample_cue
from .linalg import complex_to_real, time_extend

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Precoder:
    """Symbol-to-transmit map over t channel uses.

    ``map`` is (2 n_t t) x n_symbols real with orthonormal columns, so unitary
    precoding leaves the white-input mutual information untouched and the
    transmit power budget is preserved exactly.  ``cmap`` holds the complex
    matrix when the map is complex-linear, else None.
    """

    kind: str  # "cue_space" | "cue_space_time" | "fixed"
    t: int
    n_symbols: int
    map: np.ndarray
    label: str
    cmap: np.ndarray | None = None

    def __post_init__(self):
        gram = self.map.T @ self.map
        if np.abs(gram - np.eye(self.n_symbols)).max() > 1e-10:
            raise ValueError("precoder columns must be orthonormal")


def identity_precoder(n_t: int, t: int = 1) -> Precoder:
    dim = n_t * t
    return Precoder(
        kind="fixed",
        t=t,
        n_symbols=2 * dim,
        map=np.eye(2 * dim),
        label="none",
        cmap=np.eye(dim, dtype=complex),
    )


def cue_space(n_t: int, rng: RngSeed) -> Precoder:
    """Haar-random unitary mixing across antennas only."""
    u = sample_cue(n_t, rng)
    return Precoder(
        kind="cue_space",
        t=1,
        n_symbols=2 * n_t,
        map=complex_to_real(u),
        label="cue",
        cmap=u,
    )


def cue_space_time(n_t: int, t: int, rng: RngSeed) -> Precoder:
    """Haar-random unitary mixing across antennas and t channel uses."""
    if t < 1:
        raise ValueError("t must be >= 1")
    u = sample_cue(n_t * t, rng)
    return Precoder(
        kind="cue_space_time",
        t=t,
        n_symbols=2 * n_t * t,
        map=complex_to_real(u),
        label="cue-st",
        cmap=u,
    )


def alamouti() -> Precoder:
    """Two complex symbols on two antennas over two uses:
    slot 1 sends (s1, s2), slot 2 sends (-s2*, s1*).

    Real symbol order is (Re s1, Re s2, Im s1, Im s2); the transmit vector is
    slot-major.  Each symbol is sent twice, hence the 1/sqrt(2) scaling.
    """
    m = np.zeros((8, 4))
    # rows 0-3: real parts of (slot1 ant1, slot1 ant2, slot2 ant1, slot2 ant2),
    # rows 4-7: the matching imaginary parts
    m[0, 0] = 1.0  # Re s1
    m[1, 1] = 1.0  # Re s2
    m[2, 1] = -1.0  # Re(-s2*)
    m[3, 0] = 1.0  # Re(s1*)
    m[4, 2] = 1.0  # Im s1
    m[5, 3] = 1.0  # Im s2
    m[6, 3] = 1.0  # Im(-s2*)
    m[7, 2] = -1.0  # Im(s1*)
    return Precoder(kind="fixed", t=2, n_symbols=4, map=m / math.sqrt(2.0), label="alamouti")


def _golden_generator() -> np.ndarray:
    theta = GOLDEN_RATIO
    theta_bar = 1.0 - theta
    alpha = 1.0 + 1j * (1.0 - theta)
    alpha_bar = 1.0 + 1j * (1.0 - theta_bar)
    g = np.array(
        [
            [alpha, alpha * theta, 0, 0],
            [0, 0, 1j * alpha_bar, 1j * alpha_bar * theta_bar],
            [0, 0, alpha, alpha * theta],
            [alpha_bar, alpha_bar * theta_bar, 0, 0],
        ],
        dtype=complex,
    )
    return g / math.sqrt(5.0)


def golden_code() -> Precoder:
    """Full-rate 2x2 algebraic code on the golden ratio: four complex symbols
    (a, b, c, d) map to slot-major transmit values
        slot 1: (alpha (a + b theta), j alpha_bar (c + d theta_bar))
        slot 2: (alpha (c + d theta),   alpha_bar (a + b theta_bar))
    scaled by 1/sqrt(5); the complex generator is unitary."""
    g = _golden_generator()
    return Precoder(
        kind="fixed", t=2, n_symbols=8, map=complex_to_real(g), label="golden", cmap=g
    )


def golden_codeword(symbols: np.ndarray) -> np.ndarray:
    """2x2 space-time codeword (antennas x slots) for four complex symbols."""
    y = _golden_generator() @ np.asarray(symbols, dtype=complex)
    return np.array([[y[0], y[2]], [y[1], y[3]]])


def badr_belfiore():
    """Per-user 2x2 unitary precoders for the two-user MAC over two uses,
    built on phi = (1+sqrt 5)/2:
        P1 = [[a, a phi], [ab, ab phib]] / sqrt(5),  a = 1 + j(1 - phi),
        P2 the same with the first row rotated by j.
    Rows are unit norm because |a|^2 (1 + phi^2) = 5, and orthogonal because
    phi * phib = -1."""
    phi = GOLDEN_RATIO
    phi_bar = (1.0 - math.sqrt(5.0)) / 2.0
    alpha = 1.0 + 1j - 1j * phi
    alpha_bar = 1.0 + 1j - 1j * phi_bar
    p1 = np.array([[alpha, alpha * phi], [alpha_bar, alpha_bar * phi_bar]]) / math.sqrt(5.0)
    p2 = np.array(
        [[1j * alpha, 1j * alpha * phi], [alpha_bar, alpha_bar * phi_bar]]
    ) / math.sqrt(5.0)
    def make(u, tag):
        return Precoder(
            kind="fixed", t=2, n_symbols=4, map=complex_to_real(u), label=tag, cmap=u
        )

    return make(p1, "badr-belfiore-1"), make(p2, "badr-belfiore-2")


def apply_precoder(h: np.ndarray, p: Precoder) -> np.ndarray:
    """Real effective channel of the time-extended physical channel followed
    by the precoding map; downstream rates divide by p.t."""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    extended = complex_to_real(time_extend(h, p.t))
    if extended.shape[1] != p.map.shape[0]:
        raise ValueError(
            f"channel with {extended.shape[1]} real inputs cannot take a "
            f"{p.map.shape[0]}-input precoder"
        )
    return extended @ p.map
