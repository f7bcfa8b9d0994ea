"""Channel sampling, per-phase signal synthesis, and numeric primitives.

Randomness convention: every sampling entry point takes an integer seed and
derives an independent substream from ``(seed, purpose, index...)``, so
adding a new consumer never perturbs existing draws and results do not
depend on evaluation order.  Complex Gaussian CN(0,1) means unit *total*
variance (1/2 per real component).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

DEFAULT_POWER_RATIO = 2.0**10
DEFAULT_GROWTH_FRACTION = 0.1


def substream(seed: int, *path: int | str) -> np.random.Generator:
    """Independent generator keyed by (seed, path); same inputs, same stream."""
    words = [int(seed) & _MASK64]
    for part in path:
        if isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            words.append(int(part) & _MASK64)
    return np.random.default_rng(words)


def sample_cn(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0,1) matrix: unit total variance per complex entry."""
    return np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# --------------------------------------------------------------------------
# channels
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChannelRealization:
    """One coherence period's reciprocal user channels plus Eve's channels.

    ``user_channels[(i, j)]`` is the N_i x N_j matrix from user j to user i,
    with H[(j, i)] stored as the exact transpose of H[(i, j)].
    """

    antennas: tuple[int, ...]
    n_eve: int
    user_channels: dict[tuple[int, int], np.ndarray]
    eve_channels: tuple[np.ndarray, ...]

    @property
    def eve_stacked(self) -> np.ndarray:
        """N_E x N_T horizontal stack of Eve's per-user channels."""
        return np.hstack(self.eve_channels)

    def channel_to(self, i: int) -> np.ndarray:
        """N_i x (N_T - N_i) stack of H[(i, j)] over j != i in user order."""
        return np.hstack([self.user_channels[(i, j)] for j in range(len(self.antennas)) if j != i])


def draw_user_channels(antennas, rng: np.random.Generator) -> dict[tuple[int, int], np.ndarray]:
    """Reciprocal user-to-user channels: H[(j, i)] = H[(i, j)].T exactly."""
    channels = {}
    m = len(antennas)
    for a in range(m):
        for b in range(a + 1, m):
            mat = sample_cn(rng, (antennas[a], antennas[b]))
            channels[(a, b)] = mat
            channels[(b, a)] = mat.T
    return channels


def draw_channels(antennas, n_eve: int, rng: np.random.Generator) -> ChannelRealization:
    """Draw one realization (users first, then Eve) from an existing stream."""
    antennas = tuple(int(n) for n in antennas)
    user = draw_user_channels(antennas, rng)
    eve = tuple(sample_cn(rng, (n_eve, n)) for n in antennas)
    return ChannelRealization(antennas, int(n_eve), user, eve)


def sample_channels(cfg, seed: int) -> ChannelRealization:
    """Deterministic channel realization for (cfg, seed)."""
    return draw_channels(cfg.antennas, cfg.n_eve, substream(seed, "channels"))


# --------------------------------------------------------------------------
# signal synthesis
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Phase1Signals:
    user_rx: tuple[np.ndarray, ...]  # Y_i, N_i x K_1
    eve_rx: np.ndarray  # N_E x K_1


@dataclass(frozen=True)
class Phase2Signals:
    symbols: tuple[np.ndarray, ...]  # X_i, N_i x K_2
    user_rx: tuple[np.ndarray, ...]  # Y_i, N_i x K_2
    eve_rx: np.ndarray  # N_E x K_2


@dataclass(frozen=True)
class ModifiedSessionSignals:
    """Receptions of one modified two-user session with unequal pilot lengths.

    Node 1 hears node 2's pilot for N_2 slots then symbols for K - N_2 slots;
    node 2 symmetrically with N_1.  ``eve_rx_full`` covers all K slots.
    """

    y1_p1: np.ndarray  # N_1 x N_2
    y2_p1: np.ndarray  # N_2 x N_1
    y1_p2: np.ndarray  # N_1 x (K - N_2)
    y2_p2: np.ndarray  # N_2 x (K - N_1)
    eve_rx_full: np.ndarray  # N_E x K


def synth_phase1(ch: ChannelRealization, ps, sigma: float, seed: int,
                 noise_scale: float = 1.0) -> Phase1Signals:
    """Pilot-phase receptions: Y_i = sigma*H_i*P_(i) + W_i, Y_E = sigma*H_E*P + W_E."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    m = len(ch.antennas)
    if len(ps.blocks) != m:
        raise ValueError("pilot block count does not match channel realization")
    rng = substream(seed, "phase1-noise")
    user_rx = []
    for i in range(m):
        p_without_i = np.vstack([ps.blocks[l] for l in range(m) if l != i])
        w = noise_scale * sample_cn(rng, (ch.antennas[i], ps.k1))
        user_rx.append(sigma * ch.channel_to(i) @ p_without_i + w)
    w_eve = noise_scale * sample_cn(rng, (ch.n_eve, ps.k1))
    eve_rx = sigma * ch.eve_stacked @ ps.stacked + w_eve
    return Phase1Signals(tuple(user_rx), eve_rx)


def synth_phase2(ch: ChannelRealization, cfg, sigma: float, seed: int,
                 noise_scale: float = 1.0) -> Phase2Signals:
    """Symbol-phase receptions: Y_i = sigma*sum_{j!=i} H_ij X_j + W_i."""
    if cfg.k2 < 1:
        raise ValueError("phase 2 needs K_2 >= 1")
    if tuple(cfg.antennas) != ch.antennas:
        raise ValueError("config antennas do not match channel realization")
    m = len(ch.antennas)
    rng = substream(seed, "phase2")
    symbols = tuple(sample_cn(rng, (n, cfg.k2)) for n in ch.antennas)
    user_rx = []
    for i in range(m):
        y = noise_scale * sample_cn(rng, (ch.antennas[i], cfg.k2))
        for j in range(m):
            if j != i:
                y = y + sigma * ch.user_channels[(i, j)] @ symbols[j]
        user_rx.append(y)
    w_eve = noise_scale * sample_cn(rng, (ch.n_eve, cfg.k2))
    eve_rx = sigma * ch.eve_stacked @ np.vstack(symbols) + w_eve
    return Phase2Signals(symbols, tuple(user_rx), eve_rx)


def synth_modified_session(cfg2u, pp, ch: ChannelRealization, sigma: float, seed: int,
                           noise_scale: float = 1.0) -> ModifiedSessionSignals:
    """One full modified two-user session (both phases, both nodes, Eve).

    Eve's K-slot reception is sigma * H_E @ [[P1, X11, X12], [P21, P22, X2]]
    plus noise, where P21/P22 split node 2's pilot at column N_1 and X11/X12
    split node 1's symbols at column N_2 - N_1.
    """
    n1, n2, k = cfg2u.n1, cfg2u.n2, cfg2u.k_total
    if ch.antennas != (n1, n2):
        raise ValueError("channel realization must be built for (N_1, N_2)")
    if pp.p1.shape != (n1, n1) or pp.p2.shape != (n2, n2):
        raise ValueError("pilot shapes do not match config")
    h12 = ch.user_channels[(0, 1)]
    h21 = ch.user_channels[(1, 0)]
    rng = substream(seed, "modified-session")
    x1 = sample_cn(rng, (n1, k - n1))
    x2 = sample_cn(rng, (n2, k - n2))

    y1_p1 = sigma * h12 @ pp.p2 + noise_scale * sample_cn(rng, (n1, n2))
    y2_p1 = sigma * h21 @ pp.p1 + noise_scale * sample_cn(rng, (n2, n1))
    y1_p2 = sigma * h12 @ x2 + noise_scale * sample_cn(rng, (n1, k - n2))
    y2_p2 = sigma * h21 @ x1 + noise_scale * sample_cn(rng, (n2, k - n1))

    x11, x12 = x1[:, : n2 - n1], x1[:, n2 - n1:]
    p21, p22 = pp.p2[:, :n1], pp.p2[:, n1:]
    tx = np.block([[pp.p1, x11, x12], [p21, p22, x2]])
    eve_rx_full = sigma * ch.eve_stacked @ tx + noise_scale * sample_cn(rng, (ch.n_eve, k))
    return ModifiedSessionSignals(y1_p1, y2_p1, y1_p2, y2_p2, eve_rx_full)


# --------------------------------------------------------------------------
# numeric primitives
# --------------------------------------------------------------------------


def logdet_hpd(m: np.ndarray) -> float:
    """Base-2 log-determinant of a Hermitian positive definite matrix.

    Uses a Cholesky factorization; raises ``numpy.linalg.LinAlgError`` when
    the input is not positive definite.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("logdet_hpd needs a square matrix")
    if a.shape[0] == 0:
        return 0.0
    chol = np.linalg.cholesky(a)
    return float(2.0 * np.sum(np.log2(np.real(np.diag(chol)))))


def numerical_rank(m: np.ndarray, rtol: float | None = None) -> int:
    """Count singular values above ``rtol * s_max``.

    Default ``rtol`` is ``max(rows, cols) * 1e-12``, a scale-invariant
    threshold adequate for the moderately sized matrices used here.
    """
    a = np.asarray(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if rtol is None:
        rtol = max(a.shape) * 1e-12
    s_max = s[0]
    if s_max == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s_max))


def eig_growth_count(r_lo: np.ndarray, r_hi: np.ndarray,
                     power_ratio: float = DEFAULT_POWER_RATIO,
                     growth_fraction: float = DEFAULT_GROWTH_FRACTION) -> int:
    """Number of eigenvalues that scale with the transmit power.

    ``r_lo`` and ``r_hi`` are the same Hermitian PSD covariance evaluated at
    powers sigma2 and power_ratio * sigma2.  Sorted eigenvalues whose ratio
    exceeds ``growth_fraction * power_ratio`` are counted; with the defaults
    (ratio 2**10, fraction 0.1) power-scaled eigenvalues clear the threshold
    by orders of magnitude while bounded ones stay near ratio 1.
    """
    lo = np.asarray(r_lo)
    hi = np.asarray(r_hi)
    if lo.shape != hi.shape:
        raise ValueError("covariance shapes differ between the two powers")
    ev_lo = np.sort(np.linalg.eigvalsh(lo))[::-1]
    ev_hi = np.sort(np.linalg.eigvalsh(hi))[::-1]
    ratios = ev_hi / np.maximum(ev_lo, 1e-300)
    return int(np.count_nonzero(ratios > growth_fraction * power_ratio))


def reciprocal_channel_covariance(antennas, i: int, j: int) -> np.ndarray:
    """Exact covariance of the stacked receive-channel vectors of users i, j.

    The vector for user i stacks vec(H[(i, l)]) over l != i; reciprocity
    makes exactly N_i * N_j coordinates of the two vectors identical (the
    entries of H[(i, j)]), so the covariance is unit-diagonal with a 0/1
    cross block and rank deficiency N_i * N_j.
    """
    antennas = tuple(int(n) for n in antennas)
    m = len(antennas)
    if i == j or not (0 <= i < m and 0 <= j < m):
        raise ValueError("need two distinct user indices")

    def _positions(owner):
        # position of H[(owner, l)][r, c] inside the stacked vector, vec column-major
        offsets, off = {}, 0
        for l in range(m):
            if l == owner:
                continue
            offsets[l] = off
            off += antennas[owner] * antennas[l]
        return offsets, off

    off_i, dim_i = _positions(i)
    off_j, dim_j = _positions(j)
    cov = np.eye(dim_i + dim_j)
    # shared scalars: H[(i, j)][r, c] appears in user i's block l=j and,
    # transposed, as H[(j, i)][c, r] in user j's block l=i
    for c in range(antennas[j]):
        for r in range(antennas[i]):
            a = off_i[j] + c * antennas[i] + r
            b = dim_i + off_j[i] + r * antennas[j] + c
            cov[a, b] = 1.0
            cov[b, a] = 1.0
    return cov
