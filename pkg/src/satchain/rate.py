"""Multiplexed pair-count distributions and the pass-averaged rate.

Per attempt round each link produces a binomial number of heralded pairs;
deterministic swapping bounds the end-to-end count by the worst link (a min
order statistic, implemented both as the printed inclusion-exclusion formula
and as a direct computation from the survival functions).  Atom loss thins
the delivered count binomially, and the rate divides the expected count by
the round-trip communication time that paces the attempt rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom as _binom
from scipy.special import comb

from . import geometry as geo
from . import link_budget as lb
from . import quantum as qm
from .errors import InfeasibleGeometryError, SatchainError


@dataclass(frozen=True)
class PairDistribution:
    probabilities: np.ndarray
    n_mem: int

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (self.n_mem + 1,):
            raise SatchainError("probabilities must cover n = 0..n_mem")
        object.__setattr__(self, "probabilities", p)

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(self.n_mem + 1), self.probabilities))

    def tail_above(self) -> np.ndarray:
        """tail[n] = P(X > n)."""
        rev = np.cumsum(self.probabilities[::-1])[::-1]
        tail = np.empty_like(rev)
        tail[:-1] = rev[1:]
        tail[-1] = 0.0
        return tail


def link_distribution(n_mem: int, p_link: float) -> PairDistribution:
    """Binomial(n_mem, p_link) pair-count mass function (log-space pmf)."""
    if n_mem < 1:
        raise SatchainError("n_mem must be >= 1")
    if not (0.0 <= p_link <= 1.0):
        raise SatchainError("p_link must lie in [0, 1]")
    n = np.arange(n_mem + 1)
    pmf = np.exp(_binom.logpmf(n, n_mem, p_link)) if 0.0 < p_link < 1.0 else _binom.pmf(n, n_mem, p_link)
    return PairDistribution(probabilities=pmf, n_mem=n_mem)


def end_to_end_distribution(
    sat_dist: PairDistribution | None,
    ground_dist: PairDistribution,
    n_sat: int,
) -> PairDistribution:
    """Distribution of the minimum pair count over (n_sat - 1) satellite
    links and 2 ground links, via the printed inclusion-exclusion sums.
    """
    if n_sat < 1:
        raise SatchainError("n_sat must be >= 1")
    if n_sat >= 2:
        if sat_dist is None:
            raise SatchainError("satellite distribution required for n_sat >= 2")
        if sat_dist.n_mem != ground_dist.n_mem:
            raise SatchainError("distributions must share n_mem")
    n_mem = ground_dist.n_mem
    m = n_sat - 1

    pg = ground_dist.probabilities
    tg = ground_dist.tail_above()
    if m > 0:
        ps = sat_dist.probabilities
        ts = sat_dist.tail_above()
        term_s = np.zeros(n_mem + 1)
        for i in range(m + 1):
            term_s += comb(m, i, exact=True) * ps**i * ts ** (m - i)
        tail_s_pow = ts**m
    else:
        term_s = np.ones(n_mem + 1)
        tail_s_pow = np.ones(n_mem + 1)

    term_g = np.zeros(n_mem + 1)
    for j in range(3):
        term_g += comb(2, j, exact=True) * pg**j * tg ** (2 - j)

    out = term_s * term_g - tail_s_pow * tg**2
    out = np.clip(out, 0.0, None)
    return PairDistribution(probabilities=out, n_mem=n_mem)


def min_distribution(dists: list[PairDistribution]) -> PairDistribution:
    """Direct min-order-statistic over heterogeneous independent links."""
    if not dists:
        raise SatchainError("need at least one distribution")
    n_mem = dists[0].n_mem
    if any(d.n_mem != n_mem for d in dists):
        raise SatchainError("distributions must share n_mem")
    # P(min >= n) = prod_l P(X_l >= n), for n = 0..n_mem+1 (last entry 0)
    ge = np.ones(n_mem + 2)
    for d in dists:
        ge *= np.concatenate(([1.0], d.tail_above()))
    out = ge[:-1] - ge[1:]
    return PairDistribution(probabilities=np.clip(out, 0.0, None), n_mem=n_mem)


def loss_thinning(dist: PairDistribution, p_loss: float) -> PairDistribution:
    """Binomial thinning: every delivered pair independently survives the
    atom-loss channel with probability 1 - p_loss."""
    if not (0.0 <= p_loss <= 1.0):
        raise SatchainError("p_loss must lie in [0, 1]")
    if p_loss == 0.0:
        return dist
    q = 1.0 - p_loss
    n_mem = dist.n_mem
    out = np.zeros(n_mem + 1)
    src = dist.probabilities
    significant = src > 1e-18
    for i in np.nonzero(significant)[0]:
        out[: i + 1] += src[i] * _binom.pmf(np.arange(i + 1), i, q)
    # keep total mass exact: negligible source bins thin to ~n=0 anyway
    out[0] += src[~significant].sum()
    return PairDistribution(probabilities=out, n_mem=n_mem)


def pair_loss_probability(
    node_hardware: list[qm.HardwareParams],
    n_sat: int,
    t_com: float,
    swap_duration: float = 1e-3,
) -> float:
    """Probability that a delivered end-to-end pair is destroyed by atom loss.

    node_hardware lists the chain nodes in order: ground A, n_sat satellites,
    ground B.  Factor grouping: each of the two atoms a satellite contributes
    to the end-to-end pair must survive its swap, with survival
    (1 - p_loss_swap) * exp(-swap_duration / t_loss); the swap-loss
    probability absorbs the wait for heralds, so only the local swap
    operation of duration `swap_duration` draws on the trap-loss clock.
    Each ground atom must survive storage over the full round,
    exp(-t_com / t_loss).
    """
    if len(node_hardware) != n_sat + 2:
        raise SatchainError("need hardware for ground A, n_sat satellites, ground B")
    if t_com < 0.0 or swap_duration < 0.0:
        raise SatchainError("times must be >= 0")
    survival = 1.0
    for hw in node_hardware[1:-1]:
        atom = (1.0 - hw.p_loss_swap) * math.exp(-swap_duration / hw.t_loss)
        survival *= atom * atom
    for hw in (node_hardware[0], node_hardware[-1]):
        survival *= math.exp(-t_com / hw.t_loss)
    return 1.0 - survival


@dataclass(frozen=True)
class ChainConfig:
    constellation: geo.ConstellationSpec
    sat_terminal: lb.TerminalSpec
    ground_terminal: lb.TerminalSpec
    sat_hardware: qm.HardwareParams
    ground_hardware: qm.HardwareParams
    atmosphere: lb.AtmosphereSpec
    swap_duration: float = 1e-3
    phase_samples: int = 64
    visibility_per_photon: bool = False


@dataclass(frozen=True)
class PhaseOperatingPoint:
    """Link-level quantities at one pass phase (independent of n_mem)."""
    pass_phase: float
    geometry: geo.ChainGeometry
    ground_budgets: tuple[lb.LinkBudgetResult, lb.LinkBudgetResult]
    sat_budget: lb.LinkBudgetResult | None
    p_link_ground: tuple[float, float]
    p_link_sat: float | None
    p_loss: float
    end_state: qm.EndToEndState

    @property
    def fidelity(self) -> float:
        return self.end_state.fidelity


@dataclass(frozen=True)
class RateResult:
    pf: PairDistribution
    expected_pairs: float
    rate_hz: float
    t_com: float
    rate_center_hz: float
    fidelity: float
    p_loss: float


def operating_point(config: ChainConfig, pass_phase: float) -> PhaseOperatingPoint:
    spec = config.constellation
    geom = geo.place_chain(spec, pass_phase)
    if not geom.in_view:
        raise InfeasibleGeometryError(f"chain not in view at pass_phase {pass_phase}")
    t_com = geom.t_com

    budgets_g = tuple(
        lb.link_transmission(
            config.sat_terminal, config.ground_terminal, config.atmosphere,
            length, elevation,
        )
        for length, elevation in zip(
            (geom.link_lengths[0], geom.link_lengths[-1]), geom.elevation_angles
        )
    )
    links: list[qm.LinkState] = []
    p_link_g = []
    link_a = qm.elementary_link(
        config.sat_hardware, config.ground_hardware, budgets_g[0].p_T, t_com,
        config.visibility_per_photon,
    )
    links.append(link_a)
    p_link_g.append(link_a.p_link)

    sat_budget = None
    p_link_s = None
    if spec.n_sat >= 2:
        no_atm = lb.AtmosphereSpec(
            zenith_transmittance=config.atmosphere.zenith_transmittance,
            turbulence_widening=config.atmosphere.turbulence_widening,
            enabled=False,
        )
        sat_budget = lb.link_transmission(
            config.sat_terminal, config.sat_terminal, no_atm,
            geom.link_lengths[1], None,
        )
        sat_link = qm.elementary_link(
            config.sat_hardware, config.sat_hardware, sat_budget.p_T, t_com,
            config.visibility_per_photon,
        )
        links.extend([sat_link] * (spec.n_sat - 1))
        p_link_s = sat_link.p_link

    link_b = qm.elementary_link(
        config.sat_hardware, config.ground_hardware, budgets_g[1].p_T, t_com,
        config.visibility_per_photon,
    )
    links.append(link_b)
    p_link_g.append(link_b.p_link)

    end_state = qm.chain_state(links, spec.n_sat, config.sat_hardware.p_swap)
    node_hw = [config.ground_hardware] + [config.sat_hardware] * spec.n_sat + [config.ground_hardware]
    p_loss = pair_loss_probability(node_hw, spec.n_sat, t_com, config.swap_duration)
    return PhaseOperatingPoint(
        pass_phase=pass_phase,
        geometry=geom,
        ground_budgets=budgets_g,
        sat_budget=sat_budget,
        p_link_ground=tuple(p_link_g),
        p_link_sat=p_link_s,
        p_loss=p_loss,
        end_state=end_state,
    )


def pass_profile(config: ChainConfig) -> list[PhaseOperatingPoint]:
    """Operating points at uniformly sampled phases inside the visibility
    window (n_mem independent, so they can be reused across a mode search)."""
    lo, hi = geo.window_bounds(config.constellation)
    phases = np.linspace(lo, hi, config.phase_samples)
    return [operating_point(config, float(p)) for p in phases]


def _expected_min_pairs(point: PhaseOperatingPoint, n_mem: int, n_sat: int) -> float:
    p_g = min(point.p_link_ground)
    ground = link_distribution(n_mem, p_g)
    sat = link_distribution(n_mem, point.p_link_sat) if n_sat >= 2 else None
    return end_to_end_distribution(sat, ground, n_sat).mean


def _phase_rate(point: PhaseOperatingPoint, n_mem: int, n_sat: int) -> float:
    # Thinning is linear in the mean, so the rate only needs E[min].
    expected = _expected_min_pairs(point, n_mem, n_sat)
    return expected * (1.0 - point.p_loss) / point.geometry.t_com


def average_rate(
    config: ChainConfig,
    n_mem: int,
    profile: list[PhaseOperatingPoint] | None = None,
) -> RateResult:
    """Pass-window averaged entanglement rate, plus pass-center details."""
    if n_mem < 1:
        raise SatchainError("n_mem must be >= 1")
    n_sat = config.constellation.n_sat
    if profile is None:
        profile = pass_profile(config)
    rates = [_phase_rate(pt, n_mem, n_sat) for pt in profile]

    center = min(profile, key=lambda pt: abs(pt.pass_phase - 0.5))
    p_g = min(center.p_link_ground)
    ground = link_distribution(n_mem, p_g)
    sat = link_distribution(n_mem, center.p_link_sat) if n_sat >= 2 else None
    pf = loss_thinning(end_to_end_distribution(sat, ground, n_sat), center.p_loss)
    return RateResult(
        pf=pf,
        expected_pairs=pf.mean,
        rate_hz=float(np.mean(rates)),
        t_com=center.geometry.t_com,
        rate_center_hz=pf.mean / center.geometry.t_com,
        fidelity=center.fidelity,
        p_loss=center.p_loss,
    )


def find_min_modes(
    config: ChainConfig,
    target_rate: float,
    target_fidelity: float,
    n_max: int,
    profile: list[PhaseOperatingPoint] | None = None,
) -> int | None:
    """Smallest n_mem meeting both targets, or None when infeasible.

    The fidelity does not depend on n_mem, so it is checked once; the rate is
    monotone in n_mem, so exponential bracketing plus binary search applies.
    """
    if target_rate <= 0.0:
        raise SatchainError("target_rate must be > 0")
    if not (0.0 < target_fidelity < 1.0):
        raise SatchainError("target_fidelity must lie in (0, 1)")
    if n_max < 1:
        raise SatchainError("n_max must be >= 1")
    if profile is None:
        profile = pass_profile(config)
    n_sat = config.constellation.n_sat

    center = min(profile, key=lambda pt: abs(pt.pass_phase - 0.5))
    if center.fidelity < target_fidelity:
        return None

    def rate_of(n: int) -> float:
        return float(np.mean([_phase_rate(pt, n, n_sat) for pt in profile]))

    if rate_of(n_max) < target_rate:
        return None
    lo, hi = 1, 1
    while rate_of(hi) < target_rate:
        lo = hi + 1
        hi = min(hi * 2, n_max)
    while lo < hi:
        mid = (lo + hi) // 2
        if rate_of(mid) >= target_rate:
            hi = mid
        else:
            lo = mid + 1
    return lo
