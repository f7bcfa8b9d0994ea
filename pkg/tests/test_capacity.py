import math

import numpy as np
import pytest

from anece_lab.capacity import (
    CapacityCurve,
    cij_curve,
    cij_phase2_mc,
    ckey0_curve,
    ckey0_modified_mc,
    cond_entropy_curve,
    entropy_cond_gaussian_mc,
    phase1_cov_joint,
    phase1_curve,
    phase1_skc_exact,
)
from anece_lab.model import NetworkConfig, SnrGrid, TwoUserModifiedConfig
from anece_lab.pilots import PilotSet, build_pilots
from anece_lab.verify import default_grid, fit_slope

SCALAR_PILOTS = PilotSet((np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]])))
SCALAR_CFG = NetworkConfig((1, 1), 1, k1=1, k2=1)


def test_phase1_hand_value():
    # single-user dets are 2, joint covariance [[2, 1], [1, 2]] has det 3
    value = phase1_skc_exact(SCALAR_CFG, SCALAR_PILOTS, 0, 1, 1.0)
    assert abs(value - (2.0 - math.log2(3.0))) <= 1e-12


def test_phase1_zero_power_is_zero():
    assert phase1_skc_exact(SCALAR_CFG, SCALAR_PILOTS, 0, 1, 0.0) == 0.0
    cfg = NetworkConfig((2, 3), 0, k2=1)
    ps = build_pilots(cfg, 3)
    assert abs(phase1_skc_exact(cfg, ps, 0, 1, 0.0)) <= 1e-12


def test_phase1_hand_curve_formula():
    # with scalar unit pilots the value is 2*log2(s2+1) - log2(2*s2+1)
    grid = default_grid()
    curve = phase1_curve(SCALAR_CFG, SCALAR_PILOTS, 0, 1, grid)
    for s2, got in zip(grid.sigma2(), curve.values):
        expected = 2.0 * math.log2(s2 + 1.0) - math.log2(2.0 * s2 + 1.0)
        assert abs(got - expected) <= 1e-9


def test_phase1_symmetry_in_the_pair():
    cfg = NetworkConfig((2, 3, 1), 0, k2=1)
    ps = build_pilots(cfg, 5)
    for s2 in (1.0, 2.0**10, 2.0**20):
        a = phase1_skc_exact(cfg, ps, 0, 1, s2)
        b = phase1_skc_exact(cfg, ps, 1, 0, s2)
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_phase1_nonnegative_and_nondecreasing():
    cfg = NetworkConfig((2, 2, 2), 0, k2=1)
    ps = build_pilots(cfg, 2)
    values = [phase1_skc_exact(cfg, ps, 0, 1, s2) for s2 in default_grid().sigma2()]
    assert all(v >= 0.0 for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_phase1_rejects_same_user():
    with pytest.raises(ValueError):
        phase1_skc_exact(SCALAR_CFG, SCALAR_PILOTS, 0, 0, 1.0)


def test_cij_zero_power_is_zero():
    cfg = NetworkConfig((1, 1), 0, k2=1)
    mean, stderr = cij_phase2_mc(cfg, 0, 1, 0.0, 50, 0)
    assert mean == 0.0 and stderr == 0.0


def test_cij_nonnegative_and_nondecreasing():
    cfg = NetworkConfig((2, 2, 2), 4, k2=2)
    values = [cij_phase2_mc(cfg, 0, 1, s2, 200, 3)[0] for s2 in (0.0, 1.0, 2.0**6, 2.0**12)]
    assert all(v >= 0.0 for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_cij_reproducible_per_seed():
    cfg = NetworkConfig((2, 2, 2), 4, k2=2)
    a = cij_phase2_mc(cfg, 0, 1, 2.0**12, 100, 5)
    b = cij_phase2_mc(cfg, 0, 1, 2.0**12, 100, 5)
    c = cij_phase2_mc(cfg, 0, 1, 2.0**12, 100, 6)
    assert a == b
    assert a != c


def test_cij_stderr_scales_like_inverse_sqrt_samples():
    cfg = NetworkConfig((2, 2, 2), 4, k2=2)
    stderrs = [cij_phase2_mc(cfg, 0, 1, 2.0**16, n, 9)[1] for n in (100, 1000, 10_000)]
    expected = math.sqrt(100.0)  # se(100) / se(10000)
    assert expected / 2.0 <= stderrs[0] / stderrs[2] <= expected * 2.0


def test_ckey0_zero_power_is_zero():
    mean, stderr = ckey0_modified_mc(TwoUserModifiedConfig(2, 3, 7, 6), 0.0, 20, 0)
    assert mean == 0.0 and stderr == 0.0


def test_ckey0_equal_antennas_slope_matches_original_rate():
    # N_1 = N_2 = N with K = N + K_2 slots: slope 2*N*K_2
    c2u = TwoUserModifiedConfig(2, 2, 5, 0)
    curve = ckey0_curve(c2u, default_grid(), 800, 1)
    assert abs(fit_slope(curve).slope - 12.0) <= 0.15


def test_cond_entropy_zero_power_exact():
    expected = 2 * 4 * math.log2(math.e * math.pi)
    assert abs(entropy_cond_gaussian_mc(2, 3, 4, 0.0, 10, 0) - expected) <= 1e-9


def test_cond_entropy_narrow_slope():
    curve = cond_entropy_curve(3, 1, 2, default_grid(), 600, 2)
    assert abs(fit_slope(curve).slope - 2.0) <= 0.15


def test_cij_slope_matches_hand_dof():
    # M=3 symmetric N=2, K_2=2: 2*2 + 2*2 - 2*2 = 4
    cfg = NetworkConfig((2, 2, 2), 4, k2=2)
    curve = cij_curve(cfg, 0, 1, default_grid(), 600, 4)
    assert abs(fit_slope(curve).slope - 4.0) <= 0.15
    assert curve.mc_samples == 600


def test_phase1_slope_insensitive_to_longer_pilots():
    # any pilot length above the minimum leaves the slope at N_i*N_j
    cfg = NetworkConfig((2, 3), 0, k1=6, k2=1)
    ps = build_pilots(cfg, 2)
    slope = fit_slope(phase1_curve(cfg, ps, 0, 1, default_grid())).slope
    assert abs(slope - 6.0) <= 0.15


def test_slopes_for_a_non_adjacent_user_pair():
    from anece_lab.dofcalc import DofScenario, dof_cij

    cfg = NetworkConfig((1, 2, 3), 4, k2=2)
    target = dof_cij(DofScenario(cfg, 0, 2))
    assert target == 4  # 2*[min(1,5) + min(3,3) - min(4,2)]
    slope = fit_slope(cij_curve(cfg, 0, 2, default_grid(), 800, 3)).slope
    assert abs(slope - target) <= 0.15
    ps = build_pilots(cfg, 1)
    p1 = fit_slope(phase1_curve(cfg, ps, 0, 2, default_grid())).slope
    assert abs(p1 - 3.0) <= 0.15


def test_cij_value_matches_quadrature_oracle():
    # for two single-antenna users the per-slot value is 2*E{log2(s2*x+1)}
    # with x ~ Exp(1); the expectation comes from direct quadrature
    s2 = 4.0
    x = np.linspace(0.0, 80.0, 400_001)
    expected = 2.0 * float(np.trapezoid(np.log2(s2 * x + 1.0) * np.exp(-x), x))
    cfg = NetworkConfig((1, 1), 0, k2=1)
    mean, stderr = cij_phase2_mc(cfg, 0, 1, s2, 4000, 21)
    assert stderr < 0.05
    assert abs(mean - expected) <= 0.05


def test_cond_entropy_value_matches_quadrature_oracle():
    s2 = 4.0
    x = np.linspace(0.0, 80.0, 400_001)
    integral = float(np.trapezoid(np.log2(s2 * x + 1.0) * np.exp(-x), x))
    expected = math.log2(math.e * math.pi) + integral
    assert abs(entropy_cond_gaussian_mc(1, 1, 1, s2, 4000, 22) - expected) <= 0.02


def test_phase1_covariance_matches_synthesized_signals():
    # empirical covariance of [vec(Y_i); vec(Y_j^T)] over fresh channel and
    # noise draws must reproduce the analytic joint assembly, cross block
    # included
    from anece_lab.numkernel import sample_channels, synth_phase1

    cfg = NetworkConfig((1, 2), 0, k2=1)
    ps = build_pilots(cfg, 6)
    sigma2 = 2.0
    target = phase1_cov_joint(ps, 0, 1, sigma2)
    acc = np.zeros_like(target)
    n_draws = 8000
    for d in range(n_draws):
        ch = sample_channels(cfg, d)
        sig = synth_phase1(ch, ps, math.sqrt(sigma2), d)
        v = np.concatenate(
            [sig.user_rx[0].flatten(order="F"), sig.user_rx[1].T.flatten(order="F")]
        )
        acc += np.outer(v, v.conj())
    est = acc / n_draws
    assert np.linalg.norm(est - target) / np.linalg.norm(target) <= 0.05


def test_capacity_curve_validation():
    grid = SnrGrid((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        CapacityCurve(grid, (1.0, 2.0), 0, (0.0, 0.0))
    with pytest.raises(ValueError):
        CapacityCurve(grid, (1.0, 2.0, 3.0), 0, (0.0, -1.0, 0.0))


def test_mc_argument_validation():
    cfg = NetworkConfig((1, 1), 0, k2=1)
    with pytest.raises(ValueError):
        cij_phase2_mc(cfg, 0, 0, 1.0, 10, 0)
    with pytest.raises(ValueError):
        cij_phase2_mc(cfg, 0, 1, 1.0, 0, 0)
    with pytest.raises(ValueError):
        entropy_cond_gaussian_mc(0, 1, 1, 1.0, 10, 0)
