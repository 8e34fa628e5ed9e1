"""Scenario assembly, seeded Monte Carlo orchestration, parameter sweeps,
canned experiment geometries, and result serialization.

Reproducibility contract: every random draw of a run comes from a stream
derived statelessly from (master_seed, sweep_index, trial, component), so
results are independent of scheduling and worker count.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .channel import RisDescriptor, direct_channel, ris_rx_channel, tx_ris_channel
from .environment import (
    ClusterSet, Environment, EnvironmentConfig, rebind_receiver,
    resample_gains, sample_clusters,
)
from .geometry import Orientation, Plane, Point3, TiltAxis, distance
from .metrics import (
    LinkBudget, MetricsResult, bootstrap_mean_ci, effective_channel,
    empirical_cdf, summarize,
)
from .propagation import (
    LOS_73GHZ, NLOS_73GHZ, LosMode, LosModel, PathlossParams, wavenumber,
)
from .riscontrol import (
    PhaseConfig, combined_phase_vector, optimal_phases, partition_elements,
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scenario configuration


@dataclass
class ScenarioConfig:
    tx: Point3
    rx: list[Point3]                      # one entry per user
    ris_list: list[RisDescriptor] = field(default_factory=list)
    env: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    pl_los: PathlossParams = LOS_73GHZ
    pl_nlos: PathlossParams = NLOS_73GHZ
    los_model: LosModel = field(default_factory=LosModel)
    budget: LinkBudget = field(default_factory=LinkBudget)
    n_trials: int = 1000
    master_seed: int = 1
    direct_phase_sign: str = "paper"      # or "aligned"
    offblock: str = "include"             # other users' elements: include | exclude
    shadow_scatter_paths: bool = True
    shadow_los_paths: bool = True
    resample_geometry: bool = True        # fresh clusters every trial

    def __post_init__(self):
        if isinstance(self.rx, Point3):
            self.rx = [self.rx]
        else:
            self.rx = list(self.rx)
        self.ris_list = list(self.ris_list)


def validate(cfg: ScenarioConfig) -> list[str]:
    """Collect every violation instead of stopping at the first."""
    issues: list[str] = []
    if cfg.n_trials < 1:
        issues.append(f"n_trials must be at least 1, got {cfg.n_trials}")
    if cfg.master_seed < 0:
        issues.append(f"master_seed must be non-negative, got {cfg.master_seed}")
    if not cfg.rx:
        issues.append("at least one receiver is required")
    if cfg.direct_phase_sign not in ("paper", "aligned"):
        issues.append(f"direct_phase_sign must be 'paper' or 'aligned', "
                      f"got {cfg.direct_phase_sign!r}")
    if cfg.offblock not in ("include", "exclude"):
        issues.append(f"offblock must be 'include' or 'exclude', got {cfg.offblock!r}")
    if cfg.pl_los.freq_hz != cfg.pl_nlos.freq_hz:
        issues.append("pl_los and pl_nlos must share one carrier frequency")

    def _ground(label: str, p: Point3):
        if p.z < 0:
            issues.append(f"{label} must sit at or above ground level, z={p.z}")

    _ground("tx", cfg.tx)
    for u, rx in enumerate(cfg.rx):
        _ground(f"rx[{u}]", rx)
        if distance(cfg.tx, rx) == 0.0:
            issues.append(f"rx[{u}] coincides with the transmitter")
    for m, ris in enumerate(cfg.ris_list):
        _ground(f"ris[{m}]", ris.position)
        if distance(cfg.tx, ris.position) == 0.0:
            issues.append(f"ris[{m}] coincides with the transmitter")
        for u, rx in enumerate(cfg.rx):
            if distance(rx, ris.position) == 0.0:
                issues.append(f"ris[{m}] coincides with rx[{u}]")
        if len(cfg.rx) > ris.n_elements:
            issues.append(
                f"ris[{m}] has {ris.n_elements} elements for {len(cfg.rx)} users")
    return issues


def _require_valid(cfg: ScenarioConfig) -> None:
    issues = validate(cfg)
    if issues:
        raise ConfigError("invalid scenario:\n" + "\n".join(f"- {s}" for s in issues))


# ---------------------------------------------------------------------------
# strict JSON round-trip


def _check_keys(data: dict, allowed, ctx: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {ctx}: {', '.join(unknown)}")


def _build(cls, data: dict, ctx: str, converters: dict | None = None):
    if not isinstance(data, dict):
        raise ConfigError(f"{ctx} must be an object")
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(data, names, ctx)
    kwargs = {}
    for name, value in data.items():
        conv = (converters or {}).get(name)
        kwargs[name] = conv(value) if conv else value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {ctx}: {exc}") from exc


def _point(value, ctx: str) -> Point3:
    try:
        return Point3.from_sequence(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{ctx} must be a [x, y, z] triple: {exc}") from exc


def _orientation(data: dict) -> Orientation:
    return _build(Orientation, data, "orient", {
        "plane": lambda v: Plane(str(v).lower()),
        "tilt_axis": lambda v: None if v is None else TiltAxis(str(v).lower()),
    })


def _ris(data: dict, m: int) -> RisDescriptor:
    return _build(RisDescriptor, data, f"ris_list[{m}]", {
        "position": lambda v: _point(v, "position"),
        "orient": _orientation,
    })


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Parse a config mapping; unknown keys anywhere are a hard error."""

    def _rx(value):
        if value and isinstance(value[0], (int, float)):
            return [_point(value, "rx")]
        return [_point(v, f"rx[{u}]") for u, v in enumerate(value)]

    return _build(ScenarioConfig, data, "scenario", {
        "tx": lambda v: _point(v, "tx"),
        "rx": _rx,
        "ris_list": lambda v: [_ris(d, m) for m, d in enumerate(v)],
        "env": lambda v: _build(EnvironmentConfig, v, "env", {
            "environment": lambda s: Environment(str(s).lower()),
        }),
        "pl_los": lambda v: _build(PathlossParams, v, "pl_los"),
        "pl_nlos": lambda v: _build(PathlossParams, v, "pl_nlos"),
        "los_model": lambda v: _build(LosModel, v, "los_model", {
            "mode": lambda s: LosMode(str(s).lower()),
        }),
        "budget": lambda v: _build(LinkBudget, v, "budget"),
    })


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    """Fully resolved config echo, safe to feed back into scenario_from_dict."""
    def p(pt: Point3):
        return [pt.x, pt.y, pt.z]

    return {
        "tx": p(cfg.tx),
        "rx": [p(r) for r in cfg.rx],
        "ris_list": [
            {
                "position": p(r.position),
                "orient": {
                    "plane": r.orient.plane.value,
                    "tilt_axis": None if r.orient.tilt_axis is None
                    else r.orient.tilt_axis.value,
                    "tilt_rad": r.orient.tilt_rad,
                },
                "n_elements": r.n_elements,
                "spacing": r.spacing,
                "pattern_exponent": r.pattern_exponent,
                "amplitude": r.amplitude,
            }
            for r in cfg.ris_list
        ],
        "env": {
            "mean_clusters": cfg.env.mean_clusters,
            "max_scatterers_per_cluster": cfg.env.max_scatterers_per_cluster,
            "azimuth_spread_deg": cfg.env.azimuth_spread_deg,
            "elevation_spread_deg": cfg.env.elevation_spread_deg,
            "cluster_azimuth_limit_deg": cfg.env.cluster_azimuth_limit_deg,
            "cluster_elevation_limit_deg": cfg.env.cluster_elevation_limit_deg,
            "min_range_m": cfg.env.min_range_m,
            "environment": cfg.env.environment.value,
            "include_scatter": cfg.env.include_scatter,
        },
        "pl_los": dataclasses.asdict(cfg.pl_los),
        "pl_nlos": dataclasses.asdict(cfg.pl_nlos),
        "los_model": {
            "mode": cfg.los_model.mode.value,
            "decay_length_m": cfg.los_model.decay_length_m,
            "force_if_above_tx": cfg.los_model.force_if_above_tx,
        },
        "budget": dataclasses.asdict(cfg.budget),
        "n_trials": cfg.n_trials,
        "master_seed": cfg.master_seed,
        "direct_phase_sign": cfg.direct_phase_sign,
        "offblock": cfg.offblock,
        "shadow_scatter_paths": cfg.shadow_scatter_paths,
        "shadow_los_paths": cfg.shadow_los_paths,
        "resample_geometry": cfg.resample_geometry,
    }


def load_scenario(path: str) -> ScenarioConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


# ---------------------------------------------------------------------------
# seeded execution

# component tags for stream derivation
_CLUSTERS = 1
_TX_RIS = 2
_RIS_RX = 3
_DIRECT = 4
_BASE_GEOMETRY = 5
_BOOTSTRAP = 6


def derived_rng(master_seed: int, sweep_index: int, trial: int, *tags: int
                ) -> np.random.Generator:
    """Counter-style stream: one generator per (run, trial, component)."""
    entropy = (int(master_seed), int(sweep_index), int(trial),
               *(int(t) for t in tags))
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy))


def run_scenario(cfg: ScenarioConfig, sweep_index: int = 0, threads: int = 1
                 ) -> list[MetricsResult]:
    """Monte Carlo over n_trials; returns one MetricsResult per receiver.

    Per trial and per surface: draw clusters, synthesize the three links,
    co-phase each user's block against its direct link, and accumulate the
    effective scalar channel.  The direct link shares the first surface's
    cluster realization; a surface-free run anchors clusters on the first
    receiver instead.
    """
    _require_valid(cfg)
    receivers = cfg.rx
    n_users = len(receivers)
    k = wavenumber(cfg.pl_los.freq_hz)
    anchors = [r.position for r in cfg.ris_list] or [receivers[0]]
    seed, sweep = cfg.master_seed, sweep_index

    base_sets: list[ClusterSet] | None = None
    if not cfg.resample_geometry:
        base_sets = [
            sample_clusters(cfg.env, cfg.tx, anchor, receivers[0],
                            derived_rng(seed, sweep, 0, _BASE_GEOMETRY, m))
            for m, anchor in enumerate(anchors)
        ]

    allocations = None
    if n_users > 1:
        allocations = [partition_elements(r.n_elements, n_users)
                       for r in cfg.ris_list]

    def run_trial(t: int) -> np.ndarray:
        sets = []
        for m, anchor in enumerate(anchors):
            rng = derived_rng(seed, sweep, t, _CLUSTERS, m)
            if cfg.resample_geometry:
                sets.append(sample_clusters(cfg.env, cfg.tx, anchor,
                                            receivers[0], rng))
            else:
                sets.append(resample_gains(base_sets[m], rng))

        hs = []
        for m, ris in enumerate(cfg.ris_list):
            h, _ = tx_ris_channel(
                ris, sets[m], cfg.tx, cfg.pl_los, cfg.pl_nlos, cfg.los_model,
                derived_rng(seed, sweep, t, _TX_RIS, m),
                cfg.shadow_scatter_paths, cfg.shadow_los_paths)
            hs.append(h)

        gs = [
            [ris_rx_channel(ris, receivers[u], cfg.pl_los,
                            derived_rng(seed, sweep, t, _RIS_RX, m, u),
                            cfg.shadow_los_paths)
             for m, ris in enumerate(cfg.ris_list)]
            for u in range(n_users)
        ]

        directs = []
        for u in range(n_users):
            cs = sets[0] if u == 0 else rebind_receiver(sets[0], receivers[u])
            d, _ = direct_channel(
                cs, cfg.tx, receivers[u], cfg.pl_los, cfg.pl_nlos,
                cfg.los_model, k, derived_rng(seed, sweep, t, _DIRECT, u),
                cfg.shadow_scatter_paths, cfg.shadow_los_paths)
            directs.append(d)

        phase_vectors = []
        for m, ris in enumerate(cfg.ris_list):
            per_user = [
                optimal_phases(gs[u][m], hs[m], directs[u], ris.amplitude,
                               cfg.direct_phase_sign)
                for u in range(n_users)
            ]
            if n_users == 1:
                phase_vectors.append(per_user[0].phases)
            else:
                phase_vectors.append(combined_phase_vector(allocations[m], per_user))

        out = np.zeros(n_users, dtype=complex)
        for u in range(n_users):
            links = []
            for m, ris in enumerate(cfg.ris_list):
                if n_users > 1 and cfg.offblock == "exclude":
                    blk = allocations[m].blocks[u]
                    links.append((gs[u][m][blk],
                                  PhaseConfig(phase_vectors[m][blk], ris.amplitude),
                                  hs[m][blk]))
                else:
                    links.append((gs[u][m],
                                  PhaseConfig(phase_vectors[m], ris.amplitude),
                                  hs[m]))
            out[u] = effective_channel(links, directs[u])
        return out

    h_eff = np.zeros((n_users, cfg.n_trials), dtype=complex)
    if threads <= 1:
        for t in range(cfg.n_trials):
            h_eff[:, t] = run_trial(t)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for t, column in enumerate(pool.map(run_trial, range(cfg.n_trials))):
                h_eff[:, t] = column

    results = []
    for u in range(n_users):
        res = summarize(h_eff[u], cfg.budget, seed=cfg.master_seed)
        res.rate_ci_low, res.rate_ci_high = bootstrap_mean_ci(
            res.rate_samples, n_boot=1000,
            rng=derived_rng(seed, sweep, 0, _BOOTSTRAP, u))
        results.append(res)
    return results


# ---------------------------------------------------------------------------
# sweeps


class SweepVariable(Enum):
    RIS_X = "ris_x"
    RIS_Z = "ris_z"
    TILT = "tilt"
    N_ELEMENTS = "n_elements"
    TX_POWER_DBM = "tx_power_dbm"
    RIS_COUNT = "ris_count"


@dataclass
class SweepSpec:
    variable: SweepVariable
    values: list[float]
    target_ris: int = 0   # which surface RIS_X/RIS_Z/TILT/N_ELEMENTS act on


def apply_sweep_value(cfg: ScenarioConfig, spec: SweepSpec, value: float
                      ) -> ScenarioConfig:
    """A copy of cfg with one knob moved; the original is left untouched."""
    out = replace(cfg, rx=list(cfg.rx), ris_list=list(cfg.ris_list))
    var = spec.variable
    if var is SweepVariable.TX_POWER_DBM:
        out.budget = replace(cfg.budget, tx_power_dbm=float(value))
        return out
    if var is SweepVariable.RIS_COUNT:
        count = int(value)
        if not 0 <= count <= len(cfg.ris_list):
            raise ConfigError(
                f"ris_count {count} outside 0..{len(cfg.ris_list)} configured surfaces")
        out.ris_list = list(cfg.ris_list[:count])
        return out

    if not cfg.ris_list:
        raise ConfigError(f"sweep over {var.value} needs at least one surface")
    if not 0 <= spec.target_ris < len(cfg.ris_list):
        raise ConfigError(f"target_ris {spec.target_ris} out of range")
    ris = cfg.ris_list[spec.target_ris]
    try:
        if var is SweepVariable.RIS_X:
            pos = ris.position
            ris = replace(ris, position=Point3(float(value), pos.y, pos.z))
        elif var is SweepVariable.RIS_Z:
            pos = ris.position
            ris = replace(ris, position=Point3(pos.x, pos.y, float(value)))
        elif var is SweepVariable.TILT:
            ris = replace(ris, orient=replace(ris.orient, tilt_rad=float(value)))
        elif var is SweepVariable.N_ELEMENTS:
            ris = replace(ris, n_elements=int(value))
    except ValueError as exc:
        raise ConfigError(f"sweep value {value!r} rejected: {exc}") from exc
    out.ris_list[spec.target_ris] = ris
    return out


def run_sweep(cfg: ScenarioConfig, spec: SweepSpec, threads: int = 1
              ) -> list[tuple[float, list[MetricsResult]]]:
    """One seeded run per sweep value; the value index salts the streams."""
    if not spec.values:
        raise ConfigError("sweep needs at least one value")
    out = []
    for i, value in enumerate(spec.values):
        cfg_i = apply_sweep_value(cfg, spec, value)
        out.append((float(value), run_scenario(cfg_i, sweep_index=i,
                                               threads=threads)))
    return out


# ---------------------------------------------------------------------------
# serialization

SWEEP_HEADER = ("sweep_value,ergodic_rate_bps_hz,mean_snr_db,"
                "rate_ci_low,rate_ci_high,n_trials,seed")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_sweep_csv(path, rows: list[tuple[float, MetricsResult]]) -> Path:
    lines = [SWEEP_HEADER]
    for value, res in rows:
        lines.append(",".join([
            _fmt(value), _fmt(res.ergodic_rate), _fmt(res.mean_snr_db),
            _fmt(res.rate_ci_low), _fmt(res.rate_ci_high),
            str(res.n_trials), str(res.seed),
        ]))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_sweep_json(path, rows: list[tuple[float, MetricsResult]]) -> Path:
    records = [
        {
            "sweep_value": value,
            "ergodic_rate_bps_hz": res.ergodic_rate,
            "mean_snr_db": res.mean_snr_db,
            "rate_ci_low": res.rate_ci_low,
            "rate_ci_high": res.rate_ci_high,
            "n_trials": res.n_trials,
            "seed": res.seed,
        }
        for value, res in rows
    ]
    path = Path(path)
    path.write_text(json.dumps(records, indent=1) + "\n")
    return path


def write_cdf_csv(path, samples) -> Path:
    values, probs = empirical_cdf(samples)
    lines = ["value,probability"]
    lines.extend(f"{_fmt(v)},{_fmt(p)}" for v, p in zip(values, probs))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_metadata(path, cfg: ScenarioConfig, extra: dict | None = None) -> Path:
    payload = {"config": scenario_to_dict(cfg)}
    if extra:
        payload.update(extra)
    path = Path(path)
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return path
