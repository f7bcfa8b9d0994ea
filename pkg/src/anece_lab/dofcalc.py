"""Closed-form secure-degree-of-freedom evaluators for all ANECE variants.

Every function here is exact integer arithmetic with (x)^+ = max(x, 0);
no floats enter.  Alongside the closed forms, ``freedom_count_oracle``
recomputes the non-Gaussian entropy DoFs by summing per-block freedoms
(min of observed dimension and unknown-factor dimension, times columns),
giving an independent route against which the closed forms are checked.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import NetworkConfig, TwoUserModifiedConfig


def pos(x: int) -> int:
    """(x)^+ clamp at zero."""
    return x if x > 0 else 0


@dataclass(frozen=True)
class DofScenario:
    """One ordered user pair (i, j) inside an all-user configuration.

    All derived quantities are recomputed properties so they can never go
    stale against the underlying config.
    """

    cfg: NetworkConfig
    i: int
    j: int

    def __post_init__(self):
        m = self.cfg.m
        if not (0 <= self.i < m and 0 <= self.j < m) or self.i == self.j:
            raise ValueError("need two distinct user indices inside the config")

    @property
    def n_i(self) -> int:
        return self.cfg.antennas[self.i]

    @property
    def n_j(self) -> int:
        return self.cfg.antennas[self.j]

    @property
    def n_t(self) -> int:
        return self.cfg.n_total

    @property
    def n_min(self) -> int:
        return self.cfg.n_min

    @property
    def n_eve(self) -> int:
        return self.cfg.n_eve

    @property
    def k2(self) -> int:
        return self.cfg.k2

    @property
    def dk2(self) -> int:
        """Symbol slots beyond the pilot-ambiguity width: (K_2 - N_min)^+."""
        return pos(self.k2 - self.n_min)

    @property
    def dn_eve(self) -> int:
        """Eve antennas beyond the network total: (N_E - N_T)^+."""
        return pos(self.n_eve - self.n_t)

    def swapped(self) -> "DofScenario":
        return DofScenario(self.cfg, self.j, self.i)


@dataclass(frozen=True)
class EntropyDofs:
    """High-SNR slopes of the four leakage-analysis entropies."""

    h_yi_given_hi: int
    h_ye_given_hep: int
    h_joint_i_e: int
    h_joint_i_j_e: int


@dataclass(frozen=True)
class PairwiseDof:
    lower: int
    upper: int
    gap: int


@dataclass(frozen=True)
class ModifiedTwoUserDof:
    lower_12: int
    lower_21: int
    upper: int


# --------------------------------------------------------------------------
# all-user ANECE
# --------------------------------------------------------------------------


def dof_phase1(n_i: int, n_j: int) -> int:
    """Pilot-phase SDoF between users i and j: N_i * N_j."""
    if n_i < 1 or n_j < 1:
        raise ValueError("antenna counts must be >= 1")
    return n_i * n_j


def dof_cij(s: DofScenario) -> int:
    """Slope of the symbol-phase capacity between users i and j.

    K_2 * [min(N_i, N_T-N_i) + min(N_j, N_T-N_j) - min(N_i+N_j, N_T-N_i-N_j)].
    """
    ni, nj, nt = s.n_i, s.n_j, s.n_t
    return s.k2 * (min(ni, nt - ni) + min(nj, nt - nj) - min(ni + nj, nt - ni - nj))


def dof_entropy_terms(s: DofScenario) -> EntropyDofs:
    """The four analytic entropy slopes of the leakage and upper-bound analyses."""
    ni, nj, nt, nmin, ne, k2, dk2 = s.n_i, s.n_j, s.n_t, s.n_min, s.n_eve, s.k2, s.dk2
    h_yi_given_hi = min(ni, nt - ni) * k2
    h_ye_given_hep = ne * min(nmin, k2) + min(ne, nt) * dk2
    h_joint_i_e = (
        k2 * min(ni, nt - ni)
        + ne * min(nmin, k2)
        + dk2 * min(ne, pos(nt - 2 * ni))
    )
    h_joint_i_j_e = (
        k2 * min(ni, nt - ni - nj)
        + k2 * min(nj, pos(nt - 2 * ni - nj))
        + ne * min(nmin, k2)
        + dk2 * min(ne, pos(nt - 2 * ni - 2 * nj))
    )
    return EntropyDofs(h_yi_given_hi, h_ye_given_hep, h_joint_i_e, h_joint_i_j_e)


def dof_leakage(s: DofScenario) -> int:
    """Slope of the leakage capacity from user i to Eve in the symbol phase."""
    t = dof_entropy_terms(s)
    return t.h_yi_given_hi + t.h_ye_given_hep - t.h_joint_i_e


def dof_phase2_lower(s: DofScenario) -> int:
    """Lower bound on the symbol-phase SDoF for the ordered pair (i, j).

    K_2 min(N_j, N_T-N_j) + K_2 min(N_i, N_T-N_i)
    + dK_2 min(N_E, (N_T-2N_i)^+) - K_2 min(N_i+N_j, N_T-N_i-N_j)
    - dK_2 min(N_E, N_T);  may be negative.
    """
    ni, nj, nt, ne, k2, dk2 = s.n_i, s.n_j, s.n_t, s.n_eve, s.k2, s.dk2
    return (
        k2 * min(nj, nt - nj)
        + k2 * min(ni, nt - ni)
        + dk2 * min(ne, pos(nt - 2 * ni))
        - k2 * min(ni + nj, nt - ni - nj)
        - dk2 * min(ne, nt)
    )


def dof_phase2_lower_plus(s: DofScenario) -> int:
    """The lower bound clamped at zero."""
    return pos(dof_phase2_lower(s))


def dof_phase2_upper(s: DofScenario) -> int:
    """Upper bound on the symbol-phase SDoF (symmetric in the pair)."""
    ni, nj, nt, ne, k2, dk2 = s.n_i, s.n_j, s.n_t, s.n_eve, s.k2, s.dk2
    return (
        k2 * min(ni, nt - ni)
        + k2 * min(nj, nt - nj)
        + dk2 * min(ne, pos(nt - 2 * ni))
        + dk2 * min(ne, pos(nt - 2 * nj))
        - dk2 * min(ne, nt)
        - dk2 * min(ne, pos(nt - 2 * ni - 2 * nj))
        - k2 * min(ni, nt - ni - nj)
        - k2 * min(nj, pos(nt - 2 * ni - nj))
    )


def dof_gap(s: DofScenario) -> int:
    """Upper-minus-lower gap for the ordered pair (i, j), as a closed form."""
    ni, nj, nt, ne, k2, dk2 = s.n_i, s.n_j, s.n_t, s.n_eve, s.k2, s.dk2
    return (
        dk2 * min(ne, pos(nt - 2 * nj))
        + k2 * min(ni + nj, nt - ni - nj)
        - k2 * min(ni, nt - ni - nj)
        - k2 * min(nj, pos(nt - 2 * ni - nj))
        - dk2 * min(ne, pos(nt - 2 * ni - 2 * nj))
    )


# --------------------------------------------------------------------------
# two-user original, pair-wise, modified two-user
# --------------------------------------------------------------------------


def dof_two_user_original(n1: int, n2: int, n_eve: int, k2: int) -> int:
    """Symbol-phase SDoF of the original two-user scheme (bounds coincide).

    With dN = N_2-N_1 and dK_2 = (K_2-N_1)^+, over the three N_E regions:
    2 K_2 N_1 for N_E <= dN; 2 K_2 N_1 - dK_2 (N_E - dN) up to N_E = N_T;
    2 min(N_1, K_2) N_1 beyond.  Adjacent branches agree at the boundaries.
    """
    if n1 > n2:
        raise ValueError("needs N_1 <= N_2")
    if k2 < 0 or n_eve < 0:
        raise ValueError("K_2 and N_E must be non-negative")
    dn = n2 - n1
    dk2 = pos(k2 - n1)
    if n_eve <= dn:
        return 2 * k2 * n1
    if n_eve <= n1 + n2:
        return 2 * k2 * n1 - dk2 * (n_eve - dn)
    return 2 * min(n1, k2) * n1


def dof_pairwise(n_ip: int, n_jp: int, n_eve: int, k2_session: int) -> PairwiseDof:
    """Symbol-phase SDoF bounds of one pair-wise session.

    lower = [min(N_i, N_j) - min(N_E, N_i+N_j) + min(N_E+N_i, N_j)] * k_2,
    upper adds min(N_E+N_j, N_i) in place of min(N_i, N_j); the gap is zero
    whenever N_i <= N_j.
    """
    if k2_session < 0 or n_eve < 0:
        raise ValueError("k_2 and N_E must be non-negative")
    lower = (min(n_ip, n_jp) - min(n_eve, n_ip + n_jp) + min(n_eve + n_ip, n_jp)) * k2_session
    upper = (
        -min(n_eve, n_ip + n_jp) + min(n_eve + n_ip, n_jp) + min(n_eve + n_jp, n_ip)
    ) * k2_session
    if n_ip <= n_jp:
        gap = 0
    else:
        gap = (min(n_eve + n_jp, n_ip) - n_jp) * k2_session
    return PairwiseDof(lower, upper, gap)


def modified_entropy_terms(cfg2u: TwoUserModifiedConfig) -> tuple[int, int, int]:
    """Closed forms of the three conditional-entropy slopes of the modified scheme.

    term2: h of Eve's symbol-segment reception given her resolvable channel
    part; term3/term4: h of (user reception, Eve reception) given the
    conditioning set of user 1 resp. user 2.
    """
    n1, n2, k, ne = cfg2u.n1, cfg2u.n2, cfg2u.k_total, cfg2u.n_eve
    nt, dn = cfg2u.n_total, cfg2u.delta_n
    term2 = ne * min(n2, k - n1) + min(ne, nt) * pos(k - nt)
    term3 = n1 * (k - n2) + ne * min(n2, k - n1) + min(ne, dn) * pos(k - nt)
    term4 = n1 * (k - n1) + ne * min(n2, k - n1)
    return term2, term3, term4


def dof_modified_two_user(cfg2u: TwoUserModifiedConfig) -> ModifiedTwoUserDof:
    """Symbol-phase SDoF of the modified two-user scheme.

    lower_12 = N_1(2K-N_T) + min(N_E, dN)(K-N_T)^+ - min(N_E, N_T)(K-N_T)^+
    and lower_21 drops the middle term.  The upper bound is assembled from
    the four conditional-entropy slopes and coincides with lower_12.
    """
    n1, n2, k, ne = cfg2u.n1, cfg2u.n2, cfg2u.k_total, cfg2u.n_eve
    if n1 > n2:
        raise ValueError("needs N_1 <= N_2")
    if k < n2:
        raise ValueError("needs K >= N_2")
    nt, dn = cfg2u.n_total, cfg2u.delta_n
    lower_12 = n1 * (2 * k - nt) + min(ne, dn) * pos(k - nt) - min(ne, nt) * pos(k - nt)
    lower_21 = n1 * (2 * k - nt) - min(ne, nt) * pos(k - nt)
    term2, term3, term4 = modified_entropy_terms(cfg2u)
    # given both users' data only Eve's unresolved channel part stays free,
    # and it fills her first min(N_2, K-N_1) reception columns
    joint_all = ne * min(n2, k - n1)
    upper = term3 + term4 - term2 - joint_all
    return ModifiedTwoUserDof(lower_12, lower_21, upper)


def modified_lower_12_piecewise(cfg2u: TwoUserModifiedConfig) -> int:
    """Region form of lower_12, used for branch-agreement checks.

    N_1(2K-N_T) for N_E <= dN; minus (N_E-dN)(K-N_T)^+ up to N_E = N_T;
    N_1[2K-N_T-(2K-2N_T)^+] beyond.
    """
    n1, ne, k = cfg2u.n1, cfg2u.n_eve, cfg2u.k_total
    nt, dn = cfg2u.n_total, cfg2u.delta_n
    if ne <= dn:
        return n1 * (2 * k - nt)
    if ne <= nt:
        return n1 * (2 * k - nt) - (ne - dn) * pos(k - nt)
    return n1 * (2 * k - nt - pos(2 * k - 2 * nt))


# --------------------------------------------------------------------------
# scheme totals
# --------------------------------------------------------------------------


def dof_total(scheme: str, params) -> int:
    """Pilot-phase SDoF plus the clamped symbol-phase SDoF of a scheme.

    ``params`` is a DofScenario for "all_user", an (N_i, N_j, N_E, k_2)
    tuple for "pairwise", and a TwoUserModifiedConfig for
    "modified_two_user".
    """
    if scheme == "all_user":
        s = params
        phase2 = max(dof_phase2_lower(s), dof_phase2_lower(s.swapped()))
        return dof_phase1(s.n_i, s.n_j) + pos(phase2)
    if scheme == "pairwise":
        n_ip, n_jp, n_eve, k2_session = params
        return dof_phase1(n_ip, n_jp) + pos(dof_pairwise(n_ip, n_jp, n_eve, k2_session).upper)
    if scheme == "modified_two_user":
        cfg2u = params
        return dof_phase1(cfg2u.n1, cfg2u.n2) + pos(dof_modified_two_user(cfg2u).upper)
    raise ValueError(f"unknown scheme {scheme!r}")


# --------------------------------------------------------------------------
# structural freedom-counting oracle
# --------------------------------------------------------------------------


def _left_unknown(obs_rows: int, unknown_rows: int, cols: int) -> int:
    """Freedom of U @ B: U unknown (obs_rows x unknown_rows), B known generic."""
    return obs_rows * min(unknown_rows, cols)


def _right_unknown(obs_rows: int, unknown_rows: int, cols: int) -> int:
    """Freedom of A @ V: A known generic, V unknown (unknown_rows x cols)."""
    return min(obs_rows, unknown_rows) * cols


def freedom_count_oracle(term: str, dims) -> int:
    """Recompute an entropy slope by summing per-block freedoms.

    ``dims`` is a DofScenario for the all-user terms and a
    TwoUserModifiedConfig for the modified-scheme terms.  Each observation
    block contributes min(its row count, rank of its unknown factor) times
    its column count; blocks that the conditioning pins down contribute
    zero.  No piecewise closed form is evaluated on this path.
    """
    if term in ("ye_given_hep", "joint_i_e", "joint_i_j_e"):
        s = dims
        ni, nj, nt, nmin, ne, k2 = s.n_i, s.n_j, s.n_t, s.n_min, s.n_eve, s.k2
        cols_alpha = min(nmin, k2)
        cols_beta = k2 - cols_alpha
        if term == "ye_given_hep":
            # alpha: Eve's channel part orthogonal to the pilots (nmin rows) is free;
            # beta rows up to N_T stay free through the unknown symbols; the rest is pinned
            return (
                _left_unknown(ne, nmin, cols_alpha)
                + _right_unknown(ne, nt, cols_beta)
            )
        if term == "joint_i_e":
            null_i = pos((nt - ni) - ni)  # unknown factor rows left by user i's reception
            return (
                _right_unknown(ni, nt - ni, k2)
                + _left_unknown(ne, nmin, cols_alpha)
                + _right_unknown(ne, null_i, cols_beta)
            )
        null_after_i = pos(nt - ni - nj - ni)
        null_after_ij = pos(nt - ni - nj - ni - nj)
        return (
            _right_unknown(ni, nt - ni - nj, k2)
            + _right_unknown(nj, null_after_i, k2)
            + _left_unknown(ne, nmin, cols_alpha)
            + _right_unknown(ne, null_after_ij, cols_beta)
        )

    if term in ("modified_term2", "modified_term3", "modified_term4"):
        c = dims
        n1, n2, k, ne = c.n1, c.n2, c.k_total, c.n_eve
        nt, dn = c.n_total, c.delta_n
        cols_alpha = min(n2, k - n1)
        cols_beta = pos(k - nt)
        if term == "modified_term2":
            return _left_unknown(ne, n2, cols_alpha) + _right_unknown(ne, nt, cols_beta)
        if term == "modified_term3":
            return (
                _right_unknown(n1, n2, k - n2)
                + _left_unknown(ne, n2, cols_alpha)
                + _right_unknown(ne, dn, cols_beta)
            )
        return _right_unknown(n2, n1, k - n1) + _left_unknown(ne, n2, cols_alpha)

    raise ValueError(f"unknown freedom-count term {term!r}")
