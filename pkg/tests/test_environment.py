import math

import numpy as np
import pytest

from risim.environment import (
    ClusterSet, EnvironmentConfig, Scatterer, complex_normal, excess_phase,
    load_cluster_set, rebind_receiver, resample_gains, sample_clusters,
    save_cluster_set,
)
from risim.geometry import Point3, distance
from risim.propagation import wavelength, wavenumber

TX = Point3(0.0, 20.0, 2.0)
SURFACE = Point3(75.0, 30.0, 2.0)
RX = Point3(75.0, 35.0, 1.0)


def _sample(seed=0, **cfg_kwargs):
    cfg = EnvironmentConfig(**cfg_kwargs)
    return sample_clusters(cfg, TX, SURFACE, RX, np.random.default_rng(seed))


def test_normalization_rule():
    cs = ClusterSet(
        positions=np.ones((25, 3)),
        gains=np.ones(25, dtype=complex),
        cluster_ids=np.zeros(25, dtype=int),
        d_from_tx=np.ones(25), d_to_surface=np.ones(25), d_to_rx=np.ones(25),
        cluster_sizes=(10, 15),
    )
    assert cs.normalization == 0.2
    assert cs.normalization ** 2 * len(cs) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        ClusterSet(np.ones((3, 3)), np.ones(3, dtype=complex),
                   np.zeros(3, dtype=int), np.ones(3), np.ones(3), np.ones(3),
                   cluster_sizes=(5,))


def test_empty_set():
    cs = _sample(include_scatter=False)
    assert len(cs) == 0
    assert cs.normalization == 0.0
    assert cs.n_clusters == 0


def test_cluster_floor():
    # Poisson(1e-9) is 0 essentially always; the floor keeps one cluster
    for seed in range(20):
        cs = _sample(seed=seed, mean_clusters=1e-9)
        assert cs.n_clusters == 1


def test_cluster_count_mean():
    """Sample mean of the cluster count tracks E[max(1, Poisson(3))]
    = 3 + exp(-3)."""
    rng = np.random.default_rng(99)
    cfg = EnvironmentConfig(max_scatterers_per_cluster=2)  # keep draws cheap
    counts = [sample_clusters(cfg, TX, SURFACE, RX, rng).n_clusters
              for _ in range(10_000)]
    assert np.mean(counts) == pytest.approx(3.0 + math.exp(-3.0), rel=0.03)


def test_scatterer_count_matches_sizes():
    cs = _sample(seed=3)
    assert len(cs) == sum(cs.cluster_sizes)
    assert cs.normalization == pytest.approx(math.sqrt(1.0 / len(cs)))
    ids, counts = np.unique(cs.cluster_ids, return_counts=True)
    assert list(counts) == list(cs.cluster_sizes)
    assert list(ids) == list(range(cs.n_clusters))


def test_distances_consistent_with_positions():
    cs = _sample(seed=4)
    np.testing.assert_allclose(
        cs.d_from_tx, np.linalg.norm(cs.positions - TX.as_array(), axis=1),
        atol=1e-9)
    np.testing.assert_allclose(
        cs.d_to_surface, np.linalg.norm(cs.positions - SURFACE.as_array(), axis=1),
        atol=1e-9)
    np.testing.assert_allclose(
        cs.d_to_rx, np.linalg.norm(cs.positions - RX.as_array(), axis=1),
        atol=1e-9)
    for s in cs.scatterers()[:5]:
        assert s.d_from_tx == pytest.approx(distance(TX, s.position), abs=1e-9)
        assert s.d_to_rx == pytest.approx(distance(RX, s.position), abs=1e-9)


def test_gain_second_moment():
    draws = complex_normal(np.random.default_rng(1), size=100_000)
    assert np.mean(np.abs(draws) ** 2) == pytest.approx(1.0, rel=0.02)
    # circular symmetry: real/imag each carry half the power
    assert np.mean(draws.real ** 2) == pytest.approx(0.5, rel=0.05)
    assert abs(np.mean(draws)) < 0.02


def test_resample_gains_keeps_geometry():
    cs = _sample(seed=5)
    fresh = resample_gains(cs, np.random.default_rng(6))
    assert fresh.positions is cs.positions
    assert fresh.d_to_rx is cs.d_to_rx
    assert fresh.normalization == cs.normalization
    assert not np.array_equal(fresh.gains, cs.gains)


def test_rebind_receiver():
    cs = _sample(seed=7)
    other = Point3(10.0, 5.0, 1.0)
    moved = rebind_receiver(cs, other)
    assert moved.gains is cs.gains
    assert moved.d_from_tx is cs.d_from_tx
    np.testing.assert_allclose(
        moved.d_to_rx, np.linalg.norm(cs.positions - other.as_array(), axis=1),
        atol=1e-12)


def test_excess_phase_cases():
    k = wavenumber(73e9)
    lam = wavelength(73e9)

    def scat(d_surface, d_rx):
        return Scatterer(position=Point3(0, 0, 0), gain=1 + 0j, cluster_id=0,
                         d_from_tx=1.0, d_to_surface=d_surface, d_to_rx=d_rx)

    assert excess_phase(scat(5.0, 5.0), k) == 0.0
    assert excess_phase(scat(5.0 + lam, 5.0), k) == pytest.approx(0.0, abs=1e-9)
    assert excess_phase(scat(5.0 + lam / 4, 5.0), k) == pytest.approx(
        math.pi / 2, abs=1e-9)
    out = excess_phase(scat(5.0 + 17.3, 5.0), k)
    assert -math.pi < out <= math.pi


def test_save_load_round_trip(tmp_path):
    cs = _sample(seed=8)
    path = tmp_path / "clusters.json"
    save_cluster_set(cs, str(path))
    back = load_cluster_set(str(path))
    np.testing.assert_array_equal(back.positions, cs.positions)
    np.testing.assert_array_equal(back.gains, cs.gains)
    np.testing.assert_array_equal(back.cluster_ids, cs.cluster_ids)
    np.testing.assert_array_equal(back.d_to_surface, cs.d_to_surface)
    assert back.cluster_sizes == cs.cluster_sizes
    assert back.normalization == cs.normalization


def test_degenerate_geometry_raises():
    with pytest.raises(ValueError):
        sample_clusters(EnvironmentConfig(), TX, TX, RX, np.random.default_rng(0))


def test_config_validation():
    with pytest.raises(ValueError):
        EnvironmentConfig(mean_clusters=0.0)
    with pytest.raises(ValueError):
        EnvironmentConfig(max_scatterers_per_cluster=0)
    with pytest.raises(ValueError):
        EnvironmentConfig(min_range_m=0.0)


def test_elevations_physical():
    # spread wide enough to hit the clip; positions must stay finite
    cs = _sample(seed=9, elevation_spread_deg=80.0)
    assert np.all(np.isfinite(cs.positions))
    assert np.all(cs.d_from_tx > 0)
