import math

import numpy as np
import pytest

from risim.channel import (
    RisDescriptor, array_response, array_response_tilted, direct_channel,
    realize, ris_rx_channel, tx_ris_channel,
)
from risim.environment import (
    ClusterSet, EnvironmentConfig, resample_gains, sample_clusters,
)
from risim.geometry import Angles, Orientation, Point3, angles_at_surface
from risim.propagation import (
    LOS_73GHZ, NLOS_73GHZ, LosMode, LosModel, element_gain, pathloss_db,
    wavenumber,
)

K73 = wavenumber(73e9)
ORIGIN = Point3(0.0, 0.0, 0.0)
ALWAYS = LosModel(mode=LosMode.ALWAYS)
NEVER = LosModel(mode=LosMode.NEVER)


def _ris(n=4, tilt=0.0, spacing=None, q=0.285):
    return RisDescriptor(position=ORIGIN, orient=Orientation(tilt_rad=tilt),
                         n_elements=n, spacing=spacing, pattern_exponent=q)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        RisDescriptor(position=ORIGIN, n_elements=60)   # not a square
    with pytest.raises(ValueError):
        RisDescriptor(position=ORIGIN, n_elements=0)
    with pytest.raises(ValueError):
        RisDescriptor(position=ORIGIN, spacing=0.0)
    with pytest.raises(ValueError):
        RisDescriptor(position=ORIGIN, amplitude=1.5)
    ris = RisDescriptor(position=ORIGIN, n_elements=64)
    assert ris.side == 8
    lam = 299_792_458.0 / 73e9
    assert ris.pitch(73e9) == pytest.approx(lam / 2)
    assert RisDescriptor(position=ORIGIN, spacing=0.003).pitch(73e9) == 0.003


def test_array_response_broadside_is_ones():
    a = array_response(_ris(16), Angles(0.0, 0.0), K73)
    np.testing.assert_allclose(a, np.ones(16), atol=1e-13)


def test_array_response_single_element():
    a = array_response(_ris(1), Angles(0.7, -0.3), K73)
    np.testing.assert_allclose(a, [1.0 + 0.0j], atol=1e-13)


def test_array_response_hand_phases():
    # default spacing is half a wavelength so k d = pi; elevation pi/6
    # puts the x axis at pi/2 steps while the z axis stays flat
    a = array_response(_ris(4), Angles(azimuth=0.0, elevation=math.pi / 6), K73)
    got = np.angle(a)
    np.testing.assert_allclose(np.sort(got), [0.0, 0.0, math.pi / 2, math.pi / 2],
                               atol=1e-12)
    # documented scan order: x fastest within each z row
    np.testing.assert_allclose(got, [0.0, math.pi / 2, 0.0, math.pi / 2],
                               atol=1e-12)


def test_array_response_unit_modulus_and_leading_one():
    rng = np.random.default_rng(2)
    for _ in range(50):
        ang = Angles(rng.uniform(-math.pi, math.pi), rng.uniform(-1.5, 1.5))
        a = array_response(_ris(25), ang, K73)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)
        assert a[0] == pytest.approx(1.0 + 0.0j, abs=1e-13)


def test_tilted_reduces_to_untilted_at_zero():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.choice([1, 4, 16, 64]))
        ang = Angles(rng.uniform(-math.pi, math.pi), rng.uniform(-1.5, 1.5))
        ris = _ris(n)
        np.testing.assert_allclose(
            array_response_tilted(ris, ang, K73), array_response(ris, ang, K73),
            atol=1e-12)


def test_tilted_broadside_hand_phase():
    # at broadside only the tilt term survives: phase = -k d z sin(R)
    tilt = 0.3
    a = array_response_tilted(_ris(4, tilt=tilt), Angles(0.0, 0.0), K73)
    zs = np.array([0, 0, 1, 1])
    np.testing.assert_allclose(np.angle(a), -math.pi * math.sin(tilt) * zs,
                               atol=1e-12)


def test_tilted_quarter_turn_swaps_axis():
    # R = pi/2 turns the z coefficient into -cos(az) cos(el)
    az, el = 0.25, 0.4
    a = array_response_tilted(_ris(4, tilt=math.pi / 2), Angles(az, el), K73)
    xs, zs = np.array([0, 1, 0, 1]), np.array([0, 0, 1, 1])
    expect = math.pi * (xs * math.sin(el) - zs * math.cos(az) * math.cos(el))
    np.testing.assert_allclose(np.angle(a), expect, atol=1e-9)


def test_wavenumber_scaling_doubles_phases():
    # fixed physical pitch, doubled wavenumber -> exactly doubled phases
    ris = _ris(4, spacing=0.0005)
    ang = Angles(0.2, 0.3)
    a1 = array_response(ris, ang, K73)
    a2 = array_response(ris, ang, 2 * K73)
    np.testing.assert_allclose(np.angle(a2), 2 * np.angle(a1), atol=1e-12)


def test_tx_ris_zero_when_fully_blocked():
    h, visible = tx_ris_channel(_ris(16), ClusterSet.empty(), Point3(0, 10, 0),
                                LOS_73GHZ, NLOS_73GHZ, NEVER,
                                np.random.default_rng(0))
    assert not visible
    np.testing.assert_array_equal(h, np.zeros(16, dtype=complex))


def test_tx_ris_sightline_only_value():
    """Broadside transmitter at 1 m, no scatter, no shadowing: every element
    carries sqrt(G(0) L(1 m)) at the drawn common phase."""
    seed = 5
    tx = Point3(0.0, 1.0, 0.0)
    for n in (1, 16):
        h, visible = tx_ris_channel(_ris(n), ClusterSet.empty(), tx,
                                    LOS_73GHZ, NLOS_73GHZ, ALWAYS,
                                    np.random.default_rng(seed),
                                    shadow_los=False)
        assert visible
        eta = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi)
        amp = math.sqrt(element_gain(0.0, 0.285)
                        * 10.0 ** (pathloss_db(LOS_73GHZ, 1.0) / 10.0))
        np.testing.assert_allclose(h, amp * np.exp(1j * eta) * np.ones(n),
                                   rtol=1e-12)


def test_sightline_amplitude_tracks_pathloss():
    """Moving the transmitter out along the broadside ray rescales the
    channel norm by exactly 10^(delta_dB / 20)."""
    def norm_at(d):
        h, _ = tx_ris_channel(_ris(16), ClusterSet.empty(), Point3(0, d, 0),
                              LOS_73GHZ, NLOS_73GHZ, ALWAYS,
                              np.random.default_rng(1), shadow_los=False)
        return np.linalg.norm(h)

    delta_db = pathloss_db(LOS_73GHZ, 4.0) - pathloss_db(LOS_73GHZ, 1.0)
    assert norm_at(4.0) / norm_at(1.0) == pytest.approx(
        10.0 ** (delta_db / 20.0), rel=1e-12)


def test_ris_rx_rank_one_structure():
    ris = _ris(16)
    rx = Point3(3.0, 4.0, 2.0)
    g = ris_rx_channel(ris, rx, LOS_73GHZ, np.random.default_rng(7),
                       shadow_los=False)
    # constant envelope across elements
    np.testing.assert_allclose(np.abs(g), np.abs(g[0]), rtol=1e-12)
    ang = angles_at_surface(ris.position, ris.orient, rx)
    d = math.sqrt(3.0 ** 2 + 4.0 ** 2 + 2.0 ** 2)
    expect_pow = element_gain(ang.elevation, 0.285) \
        * 10.0 ** (pathloss_db(LOS_73GHZ, d) / 10.0)
    np.testing.assert_allclose(np.abs(g) ** 2, expect_pow, rtol=1e-12)
    # separable: phase progression matches the array response exactly
    a = array_response_tilted(ris, ang, K73)
    np.testing.assert_allclose(g / g[0], a / a[0], rtol=1e-10, atol=1e-12)


def test_ris_rx_shadow_changes_envelope_only():
    ris = _ris(9)
    rx = Point3(1.0, 6.0, 0.5)
    g0 = ris_rx_channel(ris, rx, LOS_73GHZ, np.random.default_rng(8),
                        shadow_los=False)
    g1 = ris_rx_channel(ris, rx, LOS_73GHZ, np.random.default_rng(8),
                        shadow_los=True)
    np.testing.assert_allclose(np.abs(g1 / g0), np.abs(g1[0] / g0[0]), rtol=1e-12)


def test_direct_single_scatterer_phase_follows_gain():
    beta = 0.8 * np.exp(1j * 1.1)
    cs = ClusterSet(
        positions=np.array([[10.0, 5.0, 1.0]]),
        gains=np.array([beta]),
        cluster_ids=np.array([0]),
        d_from_tx=np.array([11.0]),
        d_to_surface=np.array([6.0]),
        d_to_rx=np.array([6.0]),     # equal detours: excess phase zero
        cluster_sizes=(1,),
    )
    d, visible = direct_channel(cs, Point3(0, 0, 0), Point3(20, 0, 0),
                                LOS_73GHZ, NLOS_73GHZ, NEVER, K73,
                                np.random.default_rng(0),
                                shadow_scatter=False)
    assert not visible
    assert np.angle(d) == pytest.approx(np.angle(beta), abs=1e-12)


def test_direct_second_moment_oracle():
    """With frozen geometry and unit-variance gains the mean direct power
    equals normalization^2 times the summed linear detour losses."""
    tx, surface, rx = Point3(0, 20, 2), Point3(75, 30, 2), Point3(75, 35, 1)
    cs = sample_clusters(EnvironmentConfig(), tx, surface, rx,
                         np.random.default_rng(12))
    loss = pathloss_db(NLOS_73GHZ, cs.d_from_tx + cs.d_to_rx)
    expect = cs.normalization ** 2 * np.sum(10.0 ** (loss / 10.0))

    n_trials = 10_000
    acc = 0.0
    for t in range(n_trials):
        trial = resample_gains(cs, np.random.default_rng((t, 1)))
        d, _ = direct_channel(trial, tx, rx, LOS_73GHZ, NLOS_73GHZ, NEVER, K73,
                              np.random.default_rng((t, 2)),
                              shadow_scatter=False)
        acc += abs(d) ** 2
    assert acc / n_trials == pytest.approx(expect, rel=0.05)


def test_draw_counts_independent_of_lattice_and_tilt():
    """Streams advance identically whatever the element count or tilt, which
    is what lets different configurations share common random numbers."""
    tx, rx = Point3(0, 20, 2), Point3(75, 35, 1)
    cs = sample_clusters(EnvironmentConfig(), tx, Point3(75, 30, 2), rx,
                         np.random.default_rng(3))
    probes = []
    for n, tilt in ((16, 0.0), (256, 0.0), (16, 0.3)):
        ris = RisDescriptor(position=Point3(75, 30, 2),
                            orient=Orientation(tilt_rad=tilt), n_elements=n)
        rng = np.random.default_rng(55)
        tx_ris_channel(ris, cs, tx, LOS_73GHZ, NLOS_73GHZ, LosModel(), rng)
        ris_rx_channel(ris, rx, LOS_73GHZ, rng)
        probes.append(rng.random())
    assert probes[0] == probes[1] == probes[2]


def test_realize_bundle_deterministic():
    tx, rx = Point3(0, 20, 2), Point3(75, 35, 1)
    ris = RisDescriptor(position=Point3(75, 30, 2), n_elements=16)
    cs = sample_clusters(EnvironmentConfig(), tx, ris.position, rx,
                         np.random.default_rng(4))
    r1 = realize(ris, cs, tx, rx, LOS_73GHZ, NLOS_73GHZ, LosModel(),
                 np.random.default_rng(9))
    r2 = realize(ris, cs, tx, rx, LOS_73GHZ, NLOS_73GHZ, LosModel(),
                 np.random.default_rng(9))
    np.testing.assert_array_equal(r1.tx_ris, r2.tx_ris)
    np.testing.assert_array_equal(r1.ris_rx, r2.ris_rx)
    assert r1.tx_rx == r2.tx_rx
    assert r1.tx_ris.shape == (16,) and r1.ris_rx.shape == (16,)
    assert isinstance(r1.tx_ris_los, bool) and isinstance(r1.tx_rx_los, bool)
