"""Stochastic oracle for the analytic pair-count model.

Trials are generated in fixed-size chunks, each chunk seeded by a Philox
counter-based generator keyed on (seed, stream, chunk index).  Results are
therefore reproducible and independent of evaluation order or thread count;
histograms from different chunks merge by addition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import link_budget as lb
from . import quantum as qm
from . import rate as rt
from .errors import SatchainError

CHUNK = 8192

JITTER_MODES = ("correlated", "independent", "off")


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int = 0
    jitter_mode: str = "correlated"
    record_histogram: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise SatchainError("trials must be >= 1")
        if self.jitter_mode not in JITTER_MODES:
            raise SatchainError(f"jitter_mode must be one of {JITTER_MODES}")


@dataclass(frozen=True)
class McResult:
    histogram: np.ndarray
    mean_pairs: float
    rate_estimate: float
    tv_distance_to_analytic: float
    stderr_mean: float

    @property
    def trials(self) -> int:
        return int(self.histogram.sum())


def _rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    # Philox takes a 2-word key; pack the stream and chunk index together so
    # every (seed, stream, chunk) triple gets an independent counter sequence.
    return np.random.Generator(
        np.random.Philox(key=(seed & 0xFFFFFFFFFFFFFFFF, (stream << 32) | chunk))
    )


def _chunks(trials: int):
    start = 0
    index = 0
    while start < trials:
        yield index, min(CHUNK, trials - start)
        start += CHUNK
        index += 1


def _offset_p_T(budget: lb.LinkBudgetResult, offsets: np.ndarray) -> np.ndarray:
    """Per-attempt transmission given a jitter offset, consistent with the
    analytic budget factorization."""
    profile = lb.offset_collection(budget.rx_aperture_radius, budget.beam_waist_at_rx, offsets)
    return profile * budget.p_atmosphere * budget.p_terminal


def _draw_pair_counts(
    rng: np.random.Generator,
    n: int,
    n_mem: int,
    budget: lb.LinkBudgetResult,
    hw_tx: qm.HardwareParams,
    hw_rx: qm.HardwareParams,
    jitter_mode: str,
) -> np.ndarray:
    """Heralded pair counts for n attempt rounds of one link."""
    sigma = budget.sigma_offset
    if jitter_mode == "off" or sigma == 0.0:
        p = float(qm.heralding_probability(hw_tx, hw_rx, budget.p_T))
        return rng.binomial(n_mem, p, size=n)
    if jitter_mode == "correlated":
        # one pointing state shared by every photon of an attempt
        xy = rng.normal(0.0, sigma, size=(2, n))
        offsets = np.hypot(xy[0], xy[1])
        p = qm.heralding_probability(hw_tx, hw_rx, _offset_p_T(budget, offsets))
        return rng.binomial(n_mem, p)
    # independent jitter per photon
    xy = rng.normal(0.0, sigma, size=(2, n, n_mem))
    offsets = np.hypot(xy[0], xy[1])
    p = qm.heralding_probability(hw_tx, hw_rx, _offset_p_T(budget, offsets))
    return (rng.random(size=(n, n_mem)) < p).sum(axis=1)


def _tv_distance(histogram: np.ndarray, pmf: np.ndarray) -> float:
    freq = histogram / histogram.sum()
    return 0.5 * float(np.abs(freq - pmf).sum())


def simulate_link(
    n_mem: int,
    budget: lb.LinkBudgetResult,
    hw_tx: qm.HardwareParams,
    hw_rx: qm.HardwareParams,
    cfg: McConfig,
    t_com: float | None = None,
) -> McResult:
    """Sample the pair-count distribution of a single elementary link and
    compare it with the analytic binomial."""
    if n_mem < 1:
        raise SatchainError("n_mem must be >= 1")
    histogram = np.zeros(n_mem + 1, dtype=np.int64)
    for chunk_index, n in _chunks(cfg.trials):
        rng = _rng(cfg.seed, 0, chunk_index)
        counts = _draw_pair_counts(rng, n, n_mem, budget, hw_tx, hw_rx, cfg.jitter_mode)
        histogram += np.bincount(counts, minlength=n_mem + 1)

    p_analytic = float(qm.heralding_probability(hw_tx, hw_rx, budget.p_T))
    analytic = rt.link_distribution(n_mem, p_analytic).probabilities
    mean = float(np.dot(np.arange(n_mem + 1), histogram)) / cfg.trials
    var = float(np.dot(np.arange(n_mem + 1) ** 2, histogram)) / cfg.trials - mean**2
    return McResult(
        histogram=histogram,
        mean_pairs=mean,
        rate_estimate=mean / t_com if t_com else math.nan,
        tv_distance_to_analytic=_tv_distance(histogram, analytic),
        stderr_mean=math.sqrt(max(var, 0.0) / cfg.trials),
    )


def simulate_chain(
    config: rt.ChainConfig,
    n_mem: int,
    cfg: McConfig,
    pass_phase: float = 0.5,
) -> McResult:
    """End-to-end trial simulation: per-link heralding, min over links,
    per-atom survival draws, delivered-pair histogram."""
    if n_mem < 1:
        raise SatchainError("n_mem must be >= 1")
    point = rt.operating_point(config, pass_phase)
    n_sat = config.constellation.n_sat
    t_com = point.geometry.t_com

    link_specs = [(point.ground_budgets[0], config.sat_hardware, config.ground_hardware)]
    for _ in range(n_sat - 1):
        link_specs.append((point.sat_budget, config.sat_hardware, config.sat_hardware))
    link_specs.append((point.ground_budgets[1], config.sat_hardware, config.ground_hardware))

    surv_sat = (1.0 - config.sat_hardware.p_loss_swap) * math.exp(
        -config.swap_duration / config.sat_hardware.t_loss
    )
    surv_ground = math.exp(-t_com / config.ground_hardware.t_loss)

    histogram = np.zeros(n_mem + 1, dtype=np.int64)
    for chunk_index, n in _chunks(cfg.trials):
        delivered = None
        for link_index, (budget, hw_tx, hw_rx) in enumerate(link_specs):
            rng = _rng(cfg.seed, 1 + link_index, chunk_index)
            counts = _draw_pair_counts(rng, n, n_mem, budget, hw_tx, hw_rx, cfg.jitter_mode)
            delivered = counts if delivered is None else np.minimum(delivered, counts)
        # per-atom survival: 2 n_sat satellite atoms then 2 ground atoms
        rng = _rng(cfg.seed, 10_000, chunk_index)
        for _ in range(2 * n_sat):
            delivered = rng.binomial(delivered, surv_sat)
        for _ in range(2):
            delivered = rng.binomial(delivered, surv_ground)
        histogram += np.bincount(delivered, minlength=n_mem + 1)

    ground = rt.link_distribution(n_mem, min(point.p_link_ground))
    sat = rt.link_distribution(n_mem, point.p_link_sat) if n_sat >= 2 else None
    analytic = rt.loss_thinning(
        rt.end_to_end_distribution(sat, ground, n_sat), point.p_loss
    ).probabilities
    mean = float(np.dot(np.arange(n_mem + 1), histogram)) / cfg.trials
    var = float(np.dot(np.arange(n_mem + 1) ** 2, histogram)) / cfg.trials - mean**2
    return McResult(
        histogram=histogram,
        mean_pairs=mean,
        rate_estimate=mean / t_com,
        tv_distance_to_analytic=_tv_distance(histogram, analytic),
        stderr_mean=math.sqrt(max(var, 0.0) / cfg.trials),
    )
