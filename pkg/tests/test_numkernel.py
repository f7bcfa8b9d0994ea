import numpy as np
import pytest

from anece_lab.model import NetworkConfig, TwoUserModifiedConfig
from anece_lab.numkernel import (
    eig_growth_count,
    logdet_hpd,
    numerical_rank,
    reciprocal_channel_covariance,
    sample_channels,
    sample_cn,
    substream,
    synth_modified_session,
    synth_phase1,
    synth_phase2,
)
from anece_lab.pilots import PilotSet, build_pilots, build_square_pilots, qr_split


# --------------------------------------------------------------------------
# channel sampling
# --------------------------------------------------------------------------


def test_reciprocity_is_exact():
    cfg = NetworkConfig((2, 3, 1), 2, k2=1)
    ch = sample_channels(cfg, 0)
    for (i, j), h in ch.user_channels.items():
        assert np.max(np.abs(h - ch.user_channels[(j, i)].T)) == 0.0
    assert ch.user_channels[(0, 1)].shape == (2, 3)
    assert ch.eve_stacked.shape == (2, 6)
    assert ch.channel_to(0).shape == (2, 4)
    assert ch.channel_to(2).shape == (1, 5)


def test_trivial_reciprocity_two_scalars():
    ch = sample_channels(NetworkConfig((1, 1), 1, k2=1), 3)
    assert ch.user_channels[(0, 1)].shape == (1, 1)
    assert ch.user_channels[(0, 1)][0, 0] == ch.user_channels[(1, 0)][0, 0]


def test_unit_total_variance():
    # 10^5 entries in one draw
    cfg = NetworkConfig((100, 1000), 0, k2=1)
    ch = sample_channels(cfg, 42)
    mean_sq = float(np.mean(np.abs(ch.user_channels[(0, 1)]) ** 2))
    assert abs(mean_sq - 1.0) <= 0.02


def test_channel_determinism():
    cfg = NetworkConfig((2, 2), 3, k2=1)
    a = sample_channels(cfg, 7)
    b = sample_channels(cfg, 7)
    c = sample_channels(cfg, 8)
    assert np.array_equal(a.user_channels[(0, 1)], b.user_channels[(0, 1)])
    assert np.array_equal(a.eve_stacked, b.eve_stacked)
    assert not np.array_equal(a.user_channels[(0, 1)], c.user_channels[(0, 1)])


# --------------------------------------------------------------------------
# phase synthesis
# --------------------------------------------------------------------------


def test_phase1_zero_power_is_pure_unit_noise():
    cfg = NetworkConfig((4, 4), 0, k1=500, k2=1)
    ch = sample_channels(cfg, 1)
    ps = build_pilots(cfg, 1)
    sig = synth_phase1(ch, ps, 0.0, 2)
    entries = sig.user_rx[0].ravel()
    assert abs(float(np.mean(np.abs(entries) ** 2)) - 1.0) <= 0.1


def test_phase1_high_power_reveals_the_channel():
    cfg = NetworkConfig((1, 1), 0, k1=1, k2=1)
    ps = PilotSet((np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]])))
    ch = sample_channels(cfg, 5)
    sigma = 1000.0
    sig = synth_phase1(ch, ps, sigma, 6)
    assert abs(sig.user_rx[0][0, 0] / sigma - ch.user_channels[(0, 1)][0, 0]) <= 0.05


def test_phase1_noiseless_matches_orthonormal_factorization():
    cfg = NetworkConfig((2, 3), 4, k2=2)
    ps = build_pilots(cfg, 1)
    split = qr_split(ps)
    ch = sample_channels(cfg, 2)
    sig = synth_phase1(ch, ps, 3.0, 0, noise_scale=0.0)
    expected = 3.0 * (ch.eve_stacked @ split.q_p) @ split.r_p
    resid = np.linalg.norm(sig.eve_rx - expected) / np.linalg.norm(expected)
    assert resid <= 1e-10


def test_phase2_two_users_hear_only_each_other():
    cfg = NetworkConfig((1, 1), 2, k2=1)
    ch = sample_channels(cfg, 4)
    sig = synth_phase2(ch, cfg, 2.0, 5, noise_scale=0.0)
    assert np.allclose(sig.user_rx[1], 2.0 * ch.user_channels[(1, 0)] @ sig.symbols[0])
    assert np.allclose(sig.user_rx[0], 2.0 * ch.user_channels[(0, 1)] @ sig.symbols[1])
    assert np.allclose(
        sig.eve_rx, 2.0 * ch.eve_stacked @ np.vstack(sig.symbols)
    )


def test_phase2_shapes_and_fresh_symbols():
    cfg = NetworkConfig((2, 3, 1), 2, k2=4)
    ch = sample_channels(cfg, 4)
    a = synth_phase2(ch, cfg, 1.0, 5)
    b = synth_phase2(ch, cfg, 1.0, 6)
    assert a.symbols[0].shape == (2, 4)
    assert a.user_rx[2].shape == (1, 4)
    assert a.eve_rx.shape == (2, 4)
    assert not np.array_equal(a.symbols[0], b.symbols[0])
    again = synth_phase2(ch, cfg, 1.0, 5)
    assert np.array_equal(a.user_rx[0], again.user_rx[0])


def test_phase2_empirical_covariance_matches_model():
    # cov(vec(Y_1)) = I_{K_2} kron (sigma2 * H_1 H_1^H + I)
    cfg = NetworkConfig((2, 2), 0, k2=2)
    ch = sample_channels(cfg, 11)
    h1 = ch.channel_to(0)
    target = np.kron(np.eye(cfg.k2), h1 @ h1.conj().T + np.eye(2))
    acc = np.zeros_like(target, dtype=complex)
    n_draws = 10_000
    for d in range(n_draws):
        y = synth_phase2(ch, cfg, 1.0, d).user_rx[0].flatten(order="F")
        acc += np.outer(y, y.conj())
    est = acc / n_draws
    assert np.linalg.norm(est - target) / np.linalg.norm(target) <= 0.05


def test_modified_session_layout_noiseless():
    c2u = TwoUserModifiedConfig(1, 2, 3, 2)
    pp = build_square_pilots(c2u, 4)
    ch = sample_channels(NetworkConfig((1, 2), 2, k2=1), 9)
    sig = synth_modified_session(c2u, pp, ch, 2.0, 1, noise_scale=0.0)
    assert sig.y1_p1.shape == (1, 2)
    assert sig.y2_p1.shape == (2, 1)
    assert sig.y1_p2.shape == (1, 1)  # K - N_2 columns
    assert sig.y2_p2.shape == (2, 2)  # K - N_1 columns
    assert sig.eve_rx_full.shape == (2, 3)
    first_col = 2.0 * ch.eve_stacked @ np.vstack([pp.p1[:, :1], pp.p2[:, :1]])
    assert np.allclose(sig.eve_rx_full[:, :1], first_col)


def test_modified_session_equal_antennas_degenerates():
    # with N_1 = N_2 both pilots span the same slots and Eve's reception is
    # exactly sigma * H_E [[P1, X1], [P2, X2]]; recover X from the noiseless
    # user receptions to rebuild her full matrix
    c2u = TwoUserModifiedConfig(2, 2, 4, 3)
    pp = build_square_pilots(c2u, 0)
    ch = sample_channels(NetworkConfig((2, 2), 3, k2=1), 2)
    sigma = 2.0
    sig = synth_modified_session(c2u, pp, ch, sigma, 1, noise_scale=0.0)
    pilot_cols = sigma * ch.eve_stacked @ np.vstack([pp.p1, pp.p2])
    assert np.allclose(sig.eve_rx_full[:, :2], pilot_cols)
    x1 = np.linalg.solve(sigma * ch.user_channels[(1, 0)], sig.y2_p2)
    x2 = np.linalg.solve(sigma * ch.user_channels[(0, 1)], sig.y1_p2)
    symbol_cols = sigma * ch.eve_stacked @ np.vstack([x1, x2])
    assert np.allclose(sig.eve_rx_full[:, 2:], symbol_cols)


def test_modified_session_rejects_mismatched_channels():
    c2u = TwoUserModifiedConfig(1, 2, 3, 2)
    pp = build_square_pilots(c2u, 4)
    ch = sample_channels(NetworkConfig((2, 2), 2, k2=1), 9)
    with pytest.raises(ValueError):
        synth_modified_session(c2u, pp, ch, 1.0, 0)


# --------------------------------------------------------------------------
# numeric primitives
# --------------------------------------------------------------------------


def test_logdet_examples():
    assert logdet_hpd(np.eye(3)) == 0.0
    assert abs(logdet_hpd(np.diag([2.0, 4.0])) - 3.0) < 1e-12


def test_logdet_gram_plus_identity_is_nonnegative():
    rng = substream(0, "test-logdet")
    for _ in range(20):
        a = sample_cn(rng, (4, 4))
        assert logdet_hpd(a @ a.conj().T + np.eye(4)) >= 0.0


def test_logdet_block_additivity():
    rng = substream(1, "test-logdet")
    a = sample_cn(rng, (3, 3))
    b = sample_cn(rng, (2, 2))
    ha = a @ a.conj().T + np.eye(3)
    hb = b @ b.conj().T + np.eye(2)
    block = np.zeros((5, 5), dtype=complex)
    block[:3, :3], block[3:, 3:] = ha, hb
    assert abs(logdet_hpd(ha) + logdet_hpd(hb) - logdet_hpd(block)) <= 1e-8


def test_logdet_rejects_indefinite():
    with pytest.raises(np.linalg.LinAlgError):
        logdet_hpd(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        logdet_hpd(np.ones((2, 3)))


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3)) == 3
    u = np.array([1.0, 2.0, 0.5])
    v = np.array([3.0, -1.0])
    assert numerical_rank(np.outer(u, v)) == 1
    assert numerical_rank(np.zeros((3, 2))) == 0
    assert numerical_rank(np.zeros((0, 4))) == 0
    ps = build_pilots(NetworkConfig((2, 3), 0, k2=1), 9)
    assert numerical_rank(ps.stacked) == 3


def test_eig_growth_diagonal_example():
    r = lambda s2: np.diag([s2 + 1.0, 2.0])
    assert eig_growth_count(r(2.0**10), r(2.0**20)) == 1


def test_eig_growth_full_identity_scaling():
    r = lambda s2: s2 * np.eye(4) + np.eye(4)
    assert eig_growth_count(r(2.0**10), r(2.0**20)) == 4


def test_eig_growth_matches_coefficient_rank():
    rng = substream(5, "test-eig")
    lo, hi = 2.0**12, 2.0**22
    for trial in range(50):
        n = int(rng.integers(2, 7))
        r = int(rng.integers(0, n + 1))
        b = sample_cn(rng, (n, r)) if r else np.zeros((n, 1), dtype=complex)
        coeff = b @ b.conj().T
        count = eig_growth_count(lo * coeff + np.eye(n), hi * coeff + np.eye(n))
        assert count == numerical_rank(coeff)


def test_eig_growth_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        eig_growth_count(np.eye(2), np.eye(3))


@pytest.mark.parametrize("antennas", [(1, 1), (2, 2), (2, 3), (1, 2, 3), (2, 2, 2)])
def test_reciprocal_covariance_rank_deficiency(antennas):
    n_t = sum(antennas)
    m = len(antennas)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            cov = reciprocal_channel_covariance(antennas, i, j)
            dim_i = antennas[i] * (n_t - antennas[i])
            dim_j = antennas[j] * (n_t - antennas[j])
            expected = dim_i + dim_j - antennas[i] * antennas[j]
            assert numerical_rank(cov) == expected
