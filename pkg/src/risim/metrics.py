"""Link budget, effective channel composition, and Monte Carlo summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .riscontrol import PhaseConfig, cascade


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float = 30.0
    noise_power_dbm: float = -100.0


@dataclass
class MetricsResult:
    """Aggregates of one Monte Carlo run for a single receiver.

    mean_snr_db is 10 log10 of the trial-average linear SNR (the default
    reporting convention); snr_db_trial_mean averages the per-trial dB
    values instead.  Both are kept because the two conventions diverge
    under heavy shadowing.
    """

    ergodic_rate: float            # b/s/Hz, E[log2(1 + SNR)]
    mean_snr_db: float
    snr_db_trial_mean: float
    rate_samples: np.ndarray       # per-trial rates, trial order
    n_trials: int
    seed: int
    rate_ci_low: float = math.nan  # bootstrap CI of the mean rate
    rate_ci_high: float = math.nan


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts / 1e-3)


def effective_channel(links, h_txrx: complex) -> complex:
    """Direct link plus every surface's cascaded contribution.

    links: iterable of (g, PhaseConfig, h) triples, one per surface.
    """
    total = complex(h_txrx)
    for g, config, h in links:
        total += cascade(g, config, h)
    return total


def snr(h_effective: complex, budget: LinkBudget):
    """Linear receive SNR for scalar or array effective channels."""
    gain = np.abs(np.asarray(h_effective)) ** 2
    out = 10.0 ** (budget.tx_power_dbm / 10.0) * gain \
        / 10.0 ** (budget.noise_power_dbm / 10.0)
    return out if out.ndim else float(out)


def rate_samples(h_effective: np.ndarray, budget: LinkBudget) -> np.ndarray:
    return np.log2(1.0 + snr(np.asarray(h_effective), budget))


def ergodic_rate(h_effective: np.ndarray, budget: LinkBudget) -> tuple[float, np.ndarray]:
    """Sample-mean spectral efficiency and the per-trial rate vector.

    The mean is taken over the trial-ordered array, so the result does not
    depend on how trials were scheduled."""
    samples = rate_samples(h_effective, budget)
    return float(np.mean(samples)), samples


def summarize(h_effective: np.ndarray, budget: LinkBudget, seed: int = 0) -> MetricsResult:
    rate, samples = ergodic_rate(h_effective, budget)
    lin = snr(np.asarray(h_effective), budget)
    with np.errstate(divide="ignore"):
        mean_db = float(10.0 * np.log10(np.mean(lin))) if len(lin) else math.nan
        trial_db = float(np.mean(10.0 * np.log10(lin))) if len(lin) else math.nan
    return MetricsResult(
        ergodic_rate=rate,
        mean_snr_db=mean_db,
        snr_db_trial_mean=trial_db,
        rate_samples=samples,
        n_trials=len(samples),
        seed=seed,
    )


def empirical_cdf(samples) -> tuple[np.ndarray, np.ndarray]:
    """Sorted sample values and step probabilities i/n."""
    values = np.sort(np.asarray(samples, dtype=float))
    if len(values) == 0:
        raise ValueError("empirical_cdf needs at least one sample")
    probs = np.arange(1, len(values) + 1) / len(values)
    return values, probs


def bootstrap_mean_ci(
    samples: np.ndarray,
    n_boot: int = 1000,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the sample mean."""
    samples = np.asarray(samples, dtype=float)
    if len(samples) == 0:
        raise ValueError("bootstrap needs at least one sample")
    if rng is None:
        rng = np.random.default_rng(0)
    idx = rng.integers(0, len(samples), size=(n_boot, len(samples)))
    means = samples[idx].mean(axis=1)
    tail = (1.0 - confidence) / 2.0
    lo, hi = np.quantile(means, [tail, 1.0 - tail])
    return float(lo), float(hi)


def received_power_approx(n_elements: int, tx_power_w: float, dist_m: float,
                          wavelength_m: float) -> float:
    """Broadside far-field estimate (N + 1)^2 P_t (lambda / 4 pi d)^2.

    The +1 counts the direct path riding along with the N reflections."""
    if dist_m <= 0 or wavelength_m <= 0:
        raise ValueError("distance and wavelength must be positive")
    return (n_elements + 1) ** 2 * tx_power_w * (
        wavelength_m / (4.0 * math.pi * dist_m)) ** 2
