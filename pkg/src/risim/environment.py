"""Random scatterer geometry shared by the surface-assisted and direct links.

Cluster centres are drawn in a frame anchored at the transmitter and aimed
at the surface; each cluster carries a uniformly drawn range and a Gaussian
angular spread of scatterers.  The same realization (same gains, same
normalization) must feed every link of a trial so their small-scale fading
stays consistent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Point3, wrap_angle


class Environment(Enum):
    INDOOR = "indoor"
    OUTDOOR = "outdoor"


@dataclass(frozen=True)
class EnvironmentConfig:
    mean_clusters: float = 3.0               # Poisson mean, floored at one cluster
    max_scatterers_per_cluster: int = 30     # per-cluster count ~ UniformInt[1, max]
    azimuth_spread_deg: float = 5.0          # per-scatterer Gaussian offset
    elevation_spread_deg: float = 5.0
    cluster_azimuth_limit_deg: float = 90.0  # cluster mean azimuth ~ U(-limit, limit)
    cluster_elevation_limit_deg: float = 45.0
    min_range_m: float = 1.0                 # cluster range ~ U(min, |tx - surface|)
    environment: Environment = Environment.INDOOR
    include_scatter: bool = True             # False forces an empty (pure LOS) set

    def __post_init__(self):
        if self.mean_clusters <= 0:
            raise ValueError("mean_clusters must be positive")
        if self.max_scatterers_per_cluster < 1:
            raise ValueError("max_scatterers_per_cluster must be at least 1")
        if self.min_range_m <= 0:
            raise ValueError("min_range_m must be positive")


@dataclass(frozen=True)
class Scatterer:
    """One reflecting point with its complex gain and cached path lengths."""

    position: Point3
    gain: complex        # CN(0, 1) small-scale coefficient
    cluster_id: int
    d_from_tx: float     # transmitter -> scatterer
    d_to_surface: float  # scatterer -> surface centre
    d_to_rx: float       # scatterer -> receiver


class ClusterSet:
    """Array-backed collection of scatterers for one trial.

    positions is (S, 3); gains, cluster_ids and the three distance vectors
    are length S.  normalization is sqrt(1 / S) so that the scatter sum has
    unit average power when the gains are CN(0, 1).
    """

    __slots__ = ("positions", "gains", "cluster_ids", "d_from_tx",
                 "d_to_surface", "d_to_rx", "cluster_sizes", "normalization")

    def __init__(self, positions, gains, cluster_ids, d_from_tx,
                 d_to_surface, d_to_rx, cluster_sizes):
        self.positions = np.asarray(positions, dtype=float).reshape(-1, 3)
        self.gains = np.asarray(gains, dtype=complex).ravel()
        self.cluster_ids = np.asarray(cluster_ids, dtype=int).ravel()
        self.d_from_tx = np.asarray(d_from_tx, dtype=float).ravel()
        self.d_to_surface = np.asarray(d_to_surface, dtype=float).ravel()
        self.d_to_rx = np.asarray(d_to_rx, dtype=float).ravel()
        self.cluster_sizes = tuple(int(s) for s in cluster_sizes)
        total = sum(self.cluster_sizes)
        if total != len(self.gains):
            raise ValueError("cluster_sizes inconsistent with scatterer count")
        self.normalization = math.sqrt(1.0 / total) if total else 0.0

    def __len__(self) -> int:
        return len(self.gains)

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_sizes)

    def scatterers(self) -> list[Scatterer]:
        return [
            Scatterer(
                position=Point3(*self.positions[i]),
                gain=complex(self.gains[i]),
                cluster_id=int(self.cluster_ids[i]),
                d_from_tx=float(self.d_from_tx[i]),
                d_to_surface=float(self.d_to_surface[i]),
                d_to_rx=float(self.d_to_rx[i]),
            )
            for i in range(len(self))
        ]

    @staticmethod
    def empty() -> "ClusterSet":
        return ClusterSet(
            np.empty((0, 3)), np.empty(0, dtype=complex), np.empty(0, dtype=int),
            np.empty(0), np.empty(0), np.empty(0), (),
        )


def complex_normal(rng: np.random.Generator, size=None) -> np.ndarray:
    """CN(0, 1) draws: unit second moment, independent re/im parts."""
    re = rng.normal(0.0, math.sqrt(0.5), size=size)
    im = rng.normal(0.0, math.sqrt(0.5), size=size)
    return re + 1j * im


def _aim_frame(tx: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Rows: forward (tx -> anchor), right, up unit vectors."""
    forward = anchor - tx
    norm = np.linalg.norm(forward)
    if norm == 0.0:
        raise ValueError("transmitter and surface coincide")
    forward = forward / norm
    vertical = np.array([0.0, 0.0, 1.0])
    right = np.cross(forward, vertical)
    if np.linalg.norm(right) < 1e-12:   # aiming straight up/down
        right = np.array([1.0, 0.0, 0.0])
    right = right / np.linalg.norm(right)
    up = np.cross(right, forward)
    return np.vstack([forward, right, up])


def sample_clusters(
    cfg: EnvironmentConfig, tx: Point3, surface: Point3, rx: Point3,
    rng: np.random.Generator,
) -> ClusterSet:
    """Draw one cluster realization anchored on the tx -> surface sightline."""
    if not cfg.include_scatter:
        return ClusterSet.empty()
    txv, sv, rxv = tx.as_array(), surface.as_array(), rx.as_array()
    span = float(np.linalg.norm(sv - txv))
    if span <= 0.0:
        raise ValueError("transmitter and surface coincide")

    n_clusters = max(1, int(rng.poisson(cfg.mean_clusters)))
    sizes = rng.integers(1, cfg.max_scatterers_per_cluster + 1, size=n_clusters)
    az_lim = math.radians(cfg.cluster_azimuth_limit_deg)
    el_lim = math.radians(cfg.cluster_elevation_limit_deg)
    mean_az = rng.uniform(-az_lim, az_lim, size=n_clusters)
    mean_el = rng.uniform(-el_lim, el_lim, size=n_clusters)
    hi = max(span, cfg.min_range_m * (1.0 + 1e-9))
    ranges = rng.uniform(cfg.min_range_m, hi, size=n_clusters)

    total = int(sizes.sum())
    az = np.repeat(mean_az, sizes) + rng.normal(
        0.0, math.radians(cfg.azimuth_spread_deg), size=total)
    el = np.repeat(mean_el, sizes) + rng.normal(
        0.0, math.radians(cfg.elevation_spread_deg), size=total)
    el = np.clip(el, -np.pi / 2, np.pi / 2)
    r = np.repeat(ranges, sizes)

    frame = _aim_frame(txv, sv)
    dirs = (
        np.cos(el)[:, None] * np.cos(az)[:, None] * frame[0]
        + np.cos(el)[:, None] * np.sin(az)[:, None] * frame[1]
        + np.sin(el)[:, None] * frame[2]
    )
    positions = txv + r[:, None] * dirs
    gains = complex_normal(rng, size=total)
    ids = np.repeat(np.arange(n_clusters), sizes)

    return ClusterSet(
        positions=positions,
        gains=gains,
        cluster_ids=ids,
        d_from_tx=np.linalg.norm(positions - txv, axis=1),
        d_to_surface=np.linalg.norm(positions - sv, axis=1),
        d_to_rx=np.linalg.norm(positions - rxv, axis=1),
        cluster_sizes=sizes,
    )


def resample_gains(cs: ClusterSet, rng: np.random.Generator) -> ClusterSet:
    """Fresh CN(0, 1) gains on frozen geometry (fixed-cluster trial mode)."""
    out = ClusterSet.__new__(ClusterSet)
    out.positions = cs.positions
    out.gains = complex_normal(rng, size=len(cs))
    out.cluster_ids = cs.cluster_ids
    out.d_from_tx = cs.d_from_tx
    out.d_to_surface = cs.d_to_surface
    out.d_to_rx = cs.d_to_rx
    out.cluster_sizes = cs.cluster_sizes
    out.normalization = cs.normalization
    return out


def rebind_receiver(cs: ClusterSet, rx: Point3) -> ClusterSet:
    """Same geometry and gains, receiver-side distances recomputed.

    Used for additional receivers so every user shares one realization."""
    out = ClusterSet.__new__(ClusterSet)
    out.positions = cs.positions
    out.gains = cs.gains
    out.cluster_ids = cs.cluster_ids
    out.d_from_tx = cs.d_from_tx
    out.d_to_surface = cs.d_to_surface
    out.d_to_rx = np.linalg.norm(cs.positions - rx.as_array(), axis=1)
    out.cluster_sizes = cs.cluster_sizes
    out.normalization = cs.normalization
    return out


def excess_phase(s: Scatterer, k: float) -> float:
    """Detour phase k (d_to_surface - d_to_rx) wrapped to (-pi, pi]."""
    return float(wrap_angle(k * (s.d_to_surface - s.d_to_rx)))


def save_cluster_set(cs: ClusterSet, path: str) -> None:
    """Serialize a realization for regression fixtures (complex as re/im)."""
    payload = {
        "cluster_sizes": list(cs.cluster_sizes),
        "scatterers": [
            {
                "position": list(map(float, cs.positions[i])),
                "gain": [float(cs.gains[i].real), float(cs.gains[i].imag)],
                "cluster_id": int(cs.cluster_ids[i]),
                "d_from_tx": float(cs.d_from_tx[i]),
                "d_to_surface": float(cs.d_to_surface[i]),
                "d_to_rx": float(cs.d_to_rx[i]),
            }
            for i in range(len(cs))
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_cluster_set(path: str) -> ClusterSet:
    with open(path) as fh:
        payload = json.load(fh)
    rows = payload["scatterers"]
    return ClusterSet(
        positions=np.array([r["position"] for r in rows], dtype=float).reshape(-1, 3),
        gains=np.array([complex(r["gain"][0], r["gain"][1]) for r in rows], dtype=complex),
        cluster_ids=np.array([r["cluster_id"] for r in rows], dtype=int),
        d_from_tx=np.array([r["d_from_tx"] for r in rows], dtype=float),
        d_to_surface=np.array([r["d_to_surface"] for r in rows], dtype=float),
        d_to_rx=np.array([r["d_to_rx"] for r in rows], dtype=float),
        cluster_sizes=payload["cluster_sizes"],
    )
