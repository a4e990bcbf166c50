"""Pair-count distributions, loss thinning, rates, and the mode search."""

import math

import numpy as np
import pytest
from scipy.stats import binom

from satchain import geometry as geo
from satchain import link_budget as lb
from satchain import quantum as qm
from satchain import rate as rt
from satchain.errors import SatchainError

import oracles


def test_link_distribution_is_binomial():
    d = rt.link_distribution(10, 0.3)
    np.testing.assert_allclose(d.probabilities, binom.pmf(np.arange(11), 10, 0.3), atol=1e-14)
    assert d.mean == pytest.approx(3.0, rel=1e-12)
    assert rt.link_distribution(5, 0.0).probabilities[0] == 1.0
    assert rt.link_distribution(5, 1.0).probabilities[5] == 1.0


def test_tail_above():
    d = rt.link_distribution(4, 0.5)
    tail = d.tail_above()
    expected = [float(binom.sf(n, 4, 0.5)) for n in range(5)]
    np.testing.assert_allclose(tail, expected, atol=1e-14)


@pytest.mark.parametrize("n_sat", [1, 2, 3, 4])
def test_end_to_end_matches_exhaustive_enumeration(n_sat):
    n_mem = 6
    for ps in (0.1, 0.5, 0.9):
        for pg in (0.2, 0.7):
            sat = rt.link_distribution(n_mem, ps) if n_sat >= 2 else None
            ground = rt.link_distribution(n_mem, pg)
            got = rt.end_to_end_distribution(sat, ground, n_sat)
            pmfs = [ground.probabilities] * 2
            if n_sat >= 2:
                pmfs += [sat.probabilities] * (n_sat - 1)
            expected = oracles.min_over_binomials_oracle(pmfs)
            np.testing.assert_allclose(got.probabilities, expected, atol=1e-12)


def test_end_to_end_matches_direct_order_statistic():
    sat = rt.link_distribution(40, 0.35)
    ground = rt.link_distribution(40, 0.12)
    via_sums = rt.end_to_end_distribution(sat, ground, 5)
    direct = rt.min_distribution([ground, ground] + [sat] * 4)
    np.testing.assert_allclose(via_sums.probabilities, direct.probabilities, atol=1e-12)


def test_single_satellite_is_min_of_two_ground_links():
    ground = rt.link_distribution(12, 0.4)
    got = rt.end_to_end_distribution(None, ground, 1)
    direct = rt.min_distribution([ground, ground])
    np.testing.assert_allclose(got.probabilities, direct.probabilities, atol=1e-13)


def test_thinning_point_mass():
    point = rt.PairDistribution(
        probabilities=np.array([0.0, 0.0, 0.0, 1.0]), n_mem=3
    )
    thinned = rt.loss_thinning(point, 0.1)
    np.testing.assert_allclose(
        thinned.probabilities, [0.001, 0.027, 0.243, 0.729], atol=1e-15
    )


def test_thinning_preserves_mass_and_scales_mean():
    for p_link in (0.05, 0.4, 0.9):
        for p_loss in (0.0, 0.3, 0.97):
            d = rt.link_distribution(30, p_link)
            out = rt.loss_thinning(d, p_loss)
            assert out.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
            assert out.mean == pytest.approx((1.0 - p_loss) * d.mean, rel=1e-10)


def test_thinning_composes():
    d = rt.link_distribution(20, 0.6)
    twice = rt.loss_thinning(rt.loss_thinning(d, 0.2), 0.25)
    once = rt.loss_thinning(d, 1.0 - 0.8 * 0.75)
    np.testing.assert_allclose(twice.probabilities, once.probabilities, atol=1e-12)


def hardware(**kw):
    base = dict(
        p1=0.99, p2=0.002, eta_coll=0.49, visibility=0.999, eta_det=0.98,
        p_dark=1e-6, p_swap=0.995, p_loss_swap=0.1, tau_c=1.5, t_loss=0.01,
    )
    base.update(kw)
    return qm.HardwareParams(**base)


GROUND_HW = hardware(p_swap=1.0, p_loss_swap=0.0, tau_c=10.0, t_loss=1.5)


def test_pair_loss_trivial_cases():
    lossless_sat = hardware(p_loss_swap=0.0, t_loss=1e9)
    lossless_g = hardware(p_loss_swap=0.0, t_loss=1e9)
    nodes = [lossless_g, lossless_sat, lossless_g]
    assert rt.pair_loss_probability(nodes, 1, 0.003) == pytest.approx(0.0, abs=1e-9)

    # a single swap-lossy satellite destroys either of its two atoms
    sat = hardware(p_loss_swap=0.1, t_loss=1e9)
    nodes = [lossless_g, sat, lossless_g]
    assert rt.pair_loss_probability(nodes, 1, 0.003, swap_duration=0.0) == \
        pytest.approx(1.0 - 0.9**2, rel=1e-8)


def test_pair_loss_ground_storage_decay():
    sat = hardware(p_loss_swap=0.0, t_loss=1e9)
    g = hardware(p_loss_swap=0.0, t_loss=1.5)
    t_com = 0.0033
    expected = 1.0 - math.exp(-2.0 * t_com / 1.5)
    assert rt.pair_loss_probability([g, sat, g], 1, t_com, swap_duration=0.0) == \
        pytest.approx(expected, rel=1e-12)


def test_pair_loss_full_factorization():
    n_sat = 3
    nodes = [GROUND_HW] + [hardware()] * n_sat + [GROUND_HW]
    t_com, swap_duration = 0.004, 5e-4
    atom = (1.0 - 0.1) * math.exp(-swap_duration / 0.01)
    expected = 1.0 - atom ** (2 * n_sat) * math.exp(-2.0 * t_com / 1.5)
    assert rt.pair_loss_probability(nodes, n_sat, t_com, swap_duration) == \
        pytest.approx(expected, rel=1e-12)
    with pytest.raises(SatchainError):
        rt.pair_loss_probability(nodes, 2, t_com)


def config(distance_km=1500.0, n_sat=5, phase_samples=16, sat_radius=0.5):
    return rt.ChainConfig(
        constellation=geo.ConstellationSpec(
            n_sat=n_sat, orbit_altitude=500e3, ground_distance=distance_km * 1e3
        ),
        sat_terminal=lb.TerminalSpec(aperture_radius=sat_radius, pointing_sigma=0.41e-6),
        ground_terminal=lb.TerminalSpec(aperture_radius=0.6, pointing_sigma=0.0),
        sat_hardware=hardware(),
        ground_hardware=GROUND_HW,
        atmosphere=lb.AtmosphereSpec(zenith_transmittance=0.419066332106),
        swap_duration=5e-4,
        phase_samples=phase_samples,
    )


def test_operating_point_structure():
    point = rt.operating_point(config(), 0.5)
    assert point.geometry.in_view
    assert len(point.p_link_ground) == 2
    assert point.p_link_sat is not None
    # pass center is symmetric: both ground links identical
    assert point.p_link_ground[0] == pytest.approx(point.p_link_ground[1], rel=1e-9)
    assert 0.0 < point.p_loss < 1.0
    assert 0.9 < point.fidelity < 0.995**5 + 1e-12


def test_rate_uses_min_link_and_loss():
    cfg = config()
    profile = rt.pass_profile(cfg)
    point = min(profile, key=lambda pt: abs(pt.pass_phase - 0.5))
    n_mem = 50
    ground = rt.link_distribution(n_mem, min(point.p_link_ground))
    sat = rt.link_distribution(n_mem, point.p_link_sat)
    expected_mean = rt.end_to_end_distribution(sat, ground, 5).mean * (1.0 - point.p_loss)
    result = rt.average_rate(cfg, n_mem)
    assert result.expected_pairs == pytest.approx(expected_mean, rel=1e-9)
    assert result.rate_center_hz == pytest.approx(expected_mean / point.geometry.t_com, rel=1e-9)
    # the pass average can only be below the best-geometry center value
    assert result.rate_hz < result.rate_center_hz


def test_rate_monotone_in_n_mem():
    cfg = config(phase_samples=8)
    profile = rt.pass_profile(cfg)
    rates = [rt.average_rate(cfg, n, profile=profile).rate_hz for n in (25, 50, 100)]
    assert rates[0] < rates[1] < rates[2]


def test_find_min_modes_is_minimal():
    cfg = config(phase_samples=8)
    profile = rt.pass_profile(cfg)
    target = 50.0
    modes = rt.find_min_modes(cfg, target, 0.9, 10_000, profile=profile)
    assert modes is not None and modes > 1
    assert rt.average_rate(cfg, modes, profile=profile).rate_hz >= target
    assert rt.average_rate(cfg, modes - 1, profile=profile).rate_hz < target


def test_find_min_modes_infeasible_cases():
    cfg = config(phase_samples=8)
    profile = rt.pass_profile(cfg)
    # unreachable rate at the n_max cap
    assert rt.find_min_modes(cfg, 1e9, 0.9, 100, profile=profile) is None
    # unreachable fidelity is rejected before any rate search
    assert rt.find_min_modes(cfg, 1.0, 0.999, 100, profile=profile) is None
