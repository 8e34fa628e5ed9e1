"""Small-scale channel synthesis for the three links of an assisted hop:
transmitter -> surface (clustered scatter + optional sightline),
surface -> receiver (pure sightline), and transmitter -> receiver (scalar).

Element lattices are square with a row-major (z, x) scan, x running fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import ClusterSet
from .geometry import (
    Angles, Orientation, Point3, angles_to_targets, distance, wrap_angle,
)
from .propagation import (
    LosModel, PathlossParams, element_gain, los_indicator, pathloss_db,
    sample_shadow, wavelength,
)


@dataclass(frozen=True)
class RisDescriptor:
    """A passive reflecting surface: placement, lattice, and element model."""

    position: Point3
    orient: Orientation = Orientation()
    n_elements: int = 256
    spacing: float | None = None      # element pitch in metres; None = half wavelength
    pattern_exponent: float = 0.285   # q of the cosine-power element pattern
    amplitude: float = 1.0            # per-element reflection amplitude

    def __post_init__(self):
        side = math.isqrt(self.n_elements)
        if self.n_elements < 1 or side * side != self.n_elements:
            raise ValueError(
                f"n_elements must be a positive perfect square, got {self.n_elements}")
        if self.spacing is not None and self.spacing <= 0:
            raise ValueError("element spacing must be positive")
        if not 0.0 < self.amplitude <= 1.0:
            raise ValueError("reflection amplitude must lie in (0, 1]")
        if self.pattern_exponent < 0:
            raise ValueError("pattern exponent must be non-negative")

    @property
    def side(self) -> int:
        return math.isqrt(self.n_elements)

    def pitch(self, freq_hz: float) -> float:
        return self.spacing if self.spacing is not None else wavelength(freq_hz) / 2.0


@dataclass
class ChannelRealization:
    """One trial's links for a single surface and receiver."""

    tx_ris: np.ndarray   # (N,) transmitter -> surface
    ris_rx: np.ndarray   # (N,) surface -> receiver
    tx_rx: complex       # scalar direct link
    tx_ris_los: bool
    tx_rx_los: bool


def _lattice(side: int) -> tuple[np.ndarray, np.ndarray]:
    lin = np.arange(side * side)
    return lin % side, lin // side


def _steering_phases(
    ris: RisDescriptor, az: np.ndarray, el: np.ndarray, k: float, tilt: float,
) -> np.ndarray:
    """(M, N) lattice phases for M arrival directions, tilt folded in."""
    xs, zs = _lattice(ris.side)
    d = ris.spacing if ris.spacing is not None else math.pi / k  # half wavelength
    ce = np.cos(el)
    x_coef = np.sin(el)                                     # pairs with the x index
    z_coef = math.cos(tilt) * np.sin(az) * ce - math.sin(tilt) * np.cos(az) * ce
    return k * d * (np.outer(x_coef, xs) + np.outer(z_coef, zs))


def array_response(ris: RisDescriptor, ang: Angles, k: float) -> np.ndarray:
    """Planar response exp(j k d (x sin(el) + z sin(az) cos(el))), first entry 1."""
    ph = _steering_phases(ris, np.array([ang.azimuth]), np.array([ang.elevation]),
                          k, tilt=0.0)
    return np.exp(1j * ph[0])


def array_response_tilted(ris: RisDescriptor, ang: Angles, k: float) -> np.ndarray:
    """Response with the lattice's vertical axis pivoted by orient.tilt_rad."""
    ph = _steering_phases(ris, np.array([ang.azimuth]), np.array([ang.elevation]),
                          k, tilt=ris.orient.tilt_rad)
    return np.exp(1j * ph[0])


def tx_ris_channel(
    ris: RisDescriptor,
    clusters: ClusterSet,
    tx: Point3,
    pl_los: PathlossParams,
    pl_nlos: PathlossParams,
    los: LosModel,
    rng: np.random.Generator,
    shadow_scatter: bool = True,
    shadow_los: bool = True,
) -> tuple[np.ndarray, bool]:
    """(N,) vector from the transmitter to the surface, plus the sightline flag.

    Scattered component: normalization * sum_s gain_s
        sqrt(element_gain(el_s) * loss_s) * response(az_s, el_s),
    with per-path loss over the detour distance d_from_tx + d_to_surface.
    The sightline term adds sqrt(element_gain * loss) e^{j eta} response with
    a uniform random phase eta when the blockage draw comes up visible.

    Draw order on rng: scatter shadows, visibility, sightline shadow, eta.
    """
    k = 2.0 * math.pi / wavelength(pl_los.freq_hz)
    tilt = ris.orient.tilt_rad
    h = np.zeros(ris.n_elements, dtype=complex)

    if len(clusters):
        az, el = angles_to_targets(ris.position, ris.orient, clusters.positions)
        detour = clusters.d_from_tx + clusters.d_to_surface
        shadows = sample_shadow(pl_nlos.shadow_sigma_db, rng, size=len(clusters)) \
            if shadow_scatter else 0.0
        loss_db = pathloss_db(pl_nlos, detour, shadows)
        amp = np.sqrt(element_gain(el, ris.pattern_exponent) * 10.0 ** (loss_db / 10.0))
        phases = _steering_phases(ris, az, el, k, tilt)
        h = clusters.normalization * ((clusters.gains * amp) @ np.exp(1j * phases))

    d_link = distance(tx, ris.position)
    visible = los_indicator(los, d_link, ris.position.z, tx.z, rng)
    if visible:
        shadow = sample_shadow(pl_los.shadow_sigma_db, rng) if shadow_los else 0.0
        loss_db = pathloss_db(pl_los, d_link, shadow)
        az1, el1 = angles_to_targets(ris.position, ris.orient, tx.as_array()[None, :])
        amp = math.sqrt(element_gain(float(el1[0]), ris.pattern_exponent)
                        * 10.0 ** (loss_db / 10.0))
        eta = rng.uniform(0.0, 2.0 * math.pi)
        ph = _steering_phases(ris, az1, el1, k, tilt)
        h = h + amp * np.exp(1j * (ph[0] + eta))

    return h, bool(visible)


def ris_rx_channel(
    ris: RisDescriptor,
    rx: Point3,
    pl: PathlossParams,
    rng: np.random.Generator,
    shadow_los: bool = True,
) -> np.ndarray:
    """(N,) surface -> receiver vector; this hop is modelled as pure sightline.

    Draw order on rng: shadow, eta.
    """
    k = 2.0 * math.pi / wavelength(pl.freq_hz)
    d_link = distance(ris.position, rx)
    shadow = sample_shadow(pl.shadow_sigma_db, rng) if shadow_los else 0.0
    loss_db = pathloss_db(pl, d_link, shadow)
    az, el = angles_to_targets(ris.position, ris.orient, rx.as_array()[None, :])
    amp = math.sqrt(element_gain(float(el[0]), ris.pattern_exponent)
                    * 10.0 ** (loss_db / 10.0))
    eta = rng.uniform(0.0, 2.0 * math.pi)
    ph = _steering_phases(ris, az, el, k, ris.orient.tilt_rad)
    return amp * np.exp(1j * (ph[0] + eta))


def direct_channel(
    clusters: ClusterSet,
    tx: Point3,
    rx: Point3,
    pl_los: PathlossParams,
    pl_nlos: PathlossParams,
    los: LosModel,
    k: float,
    rng: np.random.Generator,
    shadow_scatter: bool = True,
    shadow_los: bool = True,
) -> tuple[complex, bool]:
    """Scalar transmitter -> receiver link sharing the surface's clusters.

    Each scatterer contributes its shared gain, a detour loss over
    d_from_tx + d_to_rx, and the excess phase k (d_to_surface - d_to_rx)
    that accounts for the receiver hearing the bounce at a different delay
    than the surface does.  Draw order matches tx_ris_channel.
    """
    total = 0.0 + 0.0j
    if len(clusters):
        detour = clusters.d_from_tx + clusters.d_to_rx
        shadows = sample_shadow(pl_nlos.shadow_sigma_db, rng, size=len(clusters)) \
            if shadow_scatter else 0.0
        loss_db = pathloss_db(pl_nlos, detour, shadows)
        phase = wrap_angle(k * (clusters.d_to_surface - clusters.d_to_rx))
        total = clusters.normalization * np.sum(
            clusters.gains * np.exp(1j * phase) * np.sqrt(10.0 ** (loss_db / 10.0)))

    d_link = distance(tx, rx)
    visible = los_indicator(los, d_link, rx.z, tx.z, rng)
    if visible:
        shadow = sample_shadow(pl_los.shadow_sigma_db, rng) if shadow_los else 0.0
        loss_db = pathloss_db(pl_los, d_link, shadow)
        eta = rng.uniform(0.0, 2.0 * math.pi)
        total = total + math.sqrt(10.0 ** (loss_db / 10.0)) * np.exp(1j * eta)

    return complex(total), bool(visible)


def realize(
    ris: RisDescriptor,
    clusters: ClusterSet,
    tx: Point3,
    rx: Point3,
    pl_los: PathlossParams,
    pl_nlos: PathlossParams,
    los: LosModel,
    rng: np.random.Generator,
    shadow_scatter: bool = True,
    shadow_los: bool = True,
) -> ChannelRealization:
    """Synthesize all three links of one trial from a single stream."""
    k = 2.0 * math.pi / wavelength(pl_los.freq_hz)
    h, h_los = tx_ris_channel(ris, clusters, tx, pl_los, pl_nlos, los, rng,
                              shadow_scatter, shadow_los)
    g = ris_rx_channel(ris, rx, pl_los, rng, shadow_los)
    d, d_los = direct_channel(clusters, tx, rx, pl_los, pl_nlos, los, k, rng,
                              shadow_scatter, shadow_los)
    return ChannelRealization(tx_ris=h, ris_rx=g, tx_rx=d,
                              tx_ris_los=h_los, tx_rx_los=d_los)
