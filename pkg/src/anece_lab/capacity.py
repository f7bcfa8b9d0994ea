"""Gaussian-computable secret-key-capacity terms.

The pilot-phase SKC is exact: its covariances depend only on the pilots,
so no sampling is involved.  The symbol-phase terms are Monte Carlo
averages over channel draws; each sample uses a substream keyed by
(seed, purpose, sample index), which makes the returned means
bit-reproducible and, because the key excludes sigma^2, gives common
random numbers across an SNR grid evaluated with a shared seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NetworkConfig, SnrGrid, TwoUserModifiedConfig
from .numkernel import draw_user_channels, logdet_hpd, sample_cn, substream

LOG2_E_PI = math.log2(math.e * math.pi)


@dataclass(frozen=True)
class CapacityCurve:
    """Capacity values (bits per coherence period) over an SNR grid."""

    grid: SnrGrid
    values: tuple[float, ...]
    mc_samples: int
    mc_stderr: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.grid.points) or len(self.mc_stderr) != len(self.values):
            raise ValueError("curve values/stderr must match the grid length")
        if any(s < 0 for s in self.mc_stderr):
            raise ValueError("standard errors must be non-negative")


# --------------------------------------------------------------------------
# pilot-phase covariances and exact SKC
# --------------------------------------------------------------------------


def pilot_gram_excluding(ps, i: int) -> np.ndarray:
    """K_1 x K_1 Gram of the pilots user i hears: sum_{l != i} P_l^T P_l^*."""
    k1 = ps.k1
    g = np.zeros((k1, k1), dtype=complex)
    for l, block in enumerate(ps.blocks):
        if l != i:
            g += block.T @ block.conj()
    return g


def phase1_cov_single(ps, i: int, sigma2: float) -> np.ndarray:
    """Covariance of user i's vectorized pilot-phase reception."""
    k1 = ps.k1
    n_i = ps.antennas[i]
    return np.kron(sigma2 * pilot_gram_excluding(ps, i) + np.eye(k1), np.eye(n_i))


def phase1_cov_joint(ps, i: int, j: int, sigma2: float) -> np.ndarray:
    """Joint covariance of the receptions of users i and j.

    Reciprocity couples the two receptions through the shared channel
    block, producing the sigma^2 * kron(P_j^T, P_i^*) cross term.
    """
    if i == j:
        raise ValueError("need two distinct users")
    k1 = ps.k1
    n_i, n_j = ps.antennas[i], ps.antennas[j]
    top_left = np.kron(sigma2 * pilot_gram_excluding(ps, i) + np.eye(k1), np.eye(n_i))
    bottom_right = np.kron(np.eye(n_j), sigma2 * pilot_gram_excluding(ps, j) + np.eye(k1))
    cross = sigma2 * np.kron(ps.blocks[j].T, ps.blocks[i].conj())
    return np.block([[top_left, cross], [cross.conj().T, bottom_right]])


def phase1_skc_exact(cfg: NetworkConfig, ps, i: int, j: int, sigma2: float) -> float:
    """Exact pilot-phase SKC between users i and j, in bits.

    Evaluates log2|R_i| + log2|R_j| - log2|R_joint| for the Gaussian
    reception model; the single-user determinants reduce to N_i times the
    determinant of the K_1 x K_1 pilot Gram.
    """
    if i == j:
        raise ValueError("need two distinct users")
    if ps.antennas != tuple(cfg.antennas):
        raise ValueError("pilot set does not match config")
    k1 = ps.k1
    term_i = cfg.antennas[i] * logdet_hpd(sigma2 * pilot_gram_excluding(ps, i) + np.eye(k1))
    term_j = cfg.antennas[j] * logdet_hpd(sigma2 * pilot_gram_excluding(ps, j) + np.eye(k1))
    return term_i + term_j - logdet_hpd(phase1_cov_joint(ps, i, j, sigma2))


# --------------------------------------------------------------------------
# symbol-phase Monte Carlo terms
# --------------------------------------------------------------------------


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values)
    if arr.size <= 1:
        return float(arr.mean()) if arr.size else 0.0, 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def cij_phase2_mc(cfg: NetworkConfig, i: int, j: int, sigma2: float,
                  n_samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo symbol-phase capacity between users i and j (bits, stderr).

    Averages K_2 * [log2|s2*R_i + I| + log2|s2*R_j + I| - log2|s2*R_ij + I|]
    over channel draws, where R_i sums H_il H_il^H over l != i and R_ij sums
    the stacked blocks over l outside {i, j} (the zero matrix when M = 2).
    """
    if i == j:
        raise ValueError("need two distinct users")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    m = cfg.m
    n_i, n_j, k2 = cfg.antennas[i], cfg.antennas[j], cfg.k2
    values = []
    for s in range(n_samples):
        ch = draw_user_channels(cfg.antennas, substream(seed, "cij", s))
        r_i = sum(ch[(i, l)] @ ch[(i, l)].conj().T for l in range(m) if l != i)
        r_j = sum(ch[(j, l)] @ ch[(j, l)].conj().T for l in range(m) if l != j)
        r_ij = np.zeros((n_i + n_j, n_i + n_j), dtype=complex)
        for l in range(m):
            if l not in (i, j):
                stack = np.vstack([ch[(i, l)], ch[(j, l)]])
                r_ij += stack @ stack.conj().T
        value = k2 * (
            logdet_hpd(sigma2 * r_i + np.eye(n_i))
            + logdet_hpd(sigma2 * r_j + np.eye(n_j))
            - logdet_hpd(sigma2 * r_ij + np.eye(n_i + n_j))
        )
        values.append(value)
    return _mean_stderr(values)


def ckey0_modified_mc(cfg2u: TwoUserModifiedConfig, sigma2: float,
                      n_samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo symbol-phase rate sum of the modified two-user scheme.

    Averages (K-N_1) * log2|s2*H21 H21^H + I| + (K-N_2) * log2|s2*H12 H12^H + I|
    over reciprocal channel draws (H12 = H21^T).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n1, n2, k = cfg2u.n1, cfg2u.n2, cfg2u.k_total
    values = []
    for s in range(n_samples):
        h21 = sample_cn(substream(seed, "ckey0", s), (n2, n1))
        h12 = h21.T
        value = (k - n1) * logdet_hpd(sigma2 * h21 @ h21.conj().T + np.eye(n2)) + (
            k - n2
        ) * logdet_hpd(sigma2 * h12 @ h12.conj().T + np.eye(n1))
        values.append(value)
    return _mean_stderr(values)


def entropy_cond_gaussian_mc(m: int, n: int, k: int, sigma2: float,
                             n_samples: int, seed: int) -> float:
    """Monte Carlo conditional entropy h(Y|H) for Y = sigma*H*X + W, in bits.

    Y is m x k, H is m x n with i.i.d. CN(0,1) entries; the closed Gaussian
    form is m*k*log2(e*pi) + k*E{log2|s2*H H^H + I_m|}, whose high-SNR slope
    is min(m, n)*k.
    """
    if min(m, n, k) < 1:
        raise ValueError("dimensions must be >= 1")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    total = 0.0
    for s in range(n_samples):
        h = sample_cn(substream(seed, "gauss-entropy", s), (m, n))
        total += k * logdet_hpd(sigma2 * h @ h.conj().T + np.eye(m))
    return m * k * LOG2_E_PI + total / n_samples


# --------------------------------------------------------------------------
# curves over an SNR grid
# --------------------------------------------------------------------------


def phase1_curve(cfg: NetworkConfig, ps, i: int, j: int, grid: SnrGrid) -> CapacityCurve:
    values = tuple(phase1_skc_exact(cfg, ps, i, j, s2) for s2 in grid.sigma2())
    return CapacityCurve(grid, values, 0, (0.0,) * len(values))


def cij_curve(cfg: NetworkConfig, i: int, j: int, grid: SnrGrid,
              n_samples: int, seed: int) -> CapacityCurve:
    pairs = [cij_phase2_mc(cfg, i, j, s2, n_samples, seed) for s2 in grid.sigma2()]
    return CapacityCurve(grid, tuple(p[0] for p in pairs), n_samples, tuple(p[1] for p in pairs))


def ckey0_curve(cfg2u: TwoUserModifiedConfig, grid: SnrGrid,
                n_samples: int, seed: int) -> CapacityCurve:
    pairs = [ckey0_modified_mc(cfg2u, s2, n_samples, seed) for s2 in grid.sigma2()]
    return CapacityCurve(grid, tuple(p[0] for p in pairs), n_samples, tuple(p[1] for p in pairs))


def cond_entropy_curve(m: int, n: int, k: int, grid: SnrGrid,
                       n_samples: int, seed: int) -> CapacityCurve:
    values = tuple(entropy_cond_gaussian_mc(m, n, k, s2, n_samples, seed) for s2 in grid.sigma2())
    return CapacityCurve(grid, values, n_samples, (0.0,) * len(values))
