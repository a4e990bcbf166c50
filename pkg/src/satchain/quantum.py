"""Elementary-link state coefficients and swap composition.

An elementary link is described by the mixture
rho_link = alpha |psi><psi| + beta rho_deph + gamma |g><g|,
with |psi> the target Bell state, rho_deph the fully dephased mixture of
|01> and |10>, and |g> a garbage state orthogonal to the target.  Links are
combined by near-deterministic swaps on the (alpha, beta, gamma) algebra;
swap imperfection enters the fidelity as a single p_swap^n_sat factor.

Click model (herald = one early and one late detection at the receiver):
* both photons detected: probability q_t * q_r / 2 (linear-optics BSM
  ceiling); heralds in which either emitter produced two photons are
  counted as garbage (distinguishable coincidences),
* one photon plus a dark count in either complementary detection window:
  garbage, kept to first order in p_dark,
* visibility shortfall and storage dephasing move weight from alpha to beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleLinkError, SatchainError


@dataclass(frozen=True)
class HardwareParams:
    p1: float
    p2: float
    eta_coll: float
    visibility: float
    eta_det: float
    p_dark: float
    p_swap: float
    p_loss_swap: float
    tau_c: float
    t_loss: float

    def __post_init__(self):
        probs = {
            "p1": self.p1, "p2": self.p2, "eta_coll": self.eta_coll,
            "visibility": self.visibility, "eta_det": self.eta_det,
            "p_dark": self.p_dark, "p_swap": self.p_swap,
            "p_loss_swap": self.p_loss_swap,
        }
        for name, value in probs.items():
            if not (0.0 <= value <= 1.0):
                raise SatchainError(f"{name} must lie in [0, 1]")
        if self.p1 + self.p2 > 1.0:
            raise SatchainError("p1 + p2 must be <= 1")
        if self.tau_c <= 0.0 or self.t_loss <= 0.0:
            raise SatchainError("tau_c and t_loss must be > 0")


@dataclass(frozen=True)
class LinkState:
    alpha: float
    beta: float
    gamma: float
    p_link: float
    storage_time: float


@dataclass(frozen=True)
class EndToEndState:
    A: float
    B: float
    C: float
    swap_power: float

    @property
    def fidelity(self) -> float:
        return self.swap_power * (self.A + self.B / 2.0) / (self.A + self.B + self.C)


def heralding_terms(hw_tx: HardwareParams, hw_rx: HardwareParams, p_T):
    """(p_link, clean, garbage) heralding components; vectorized over p_T.

    clean + garbage = p_link; `clean` is the herald weight free of two-photon
    taint and dark-count assistance.
    """
    e_t = hw_tx.p1 + hw_tx.p2
    e_r = hw_rx.p1 + hw_rx.p2
    q_t = e_t * hw_tx.eta_coll * hw_rx.eta_det * np.asarray(p_T, dtype=float)
    q_r = e_r * hw_rx.eta_coll * hw_rx.eta_det
    p_both = 0.5 * q_t * q_r
    # One real photon, one dark count in either of the two complementary
    # detection windows; first order in p_dark.
    p_dark_herald = 0.5 * (q_t * (1.0 - q_r) + q_r * (1.0 - q_t)) * 2.0 * hw_rx.p_dark
    clean_fraction = 0.0
    if e_t > 0.0 and e_r > 0.0:
        clean_fraction = (hw_tx.p1 / e_t) * (hw_rx.p1 / e_r)
    clean = p_both * clean_fraction
    garbage = p_both * (1.0 - clean_fraction) + p_dark_herald
    return clean + garbage, clean, garbage


def heralding_probability(hw_tx: HardwareParams, hw_rx: HardwareParams, p_T):
    return heralding_terms(hw_tx, hw_rx, p_T)[0]


def effective_tau(hw_tx: HardwareParams, hw_rx: HardwareParams) -> float:
    """Both atoms dephase independently; rates add."""
    return 1.0 / (1.0 / hw_tx.tau_c + 1.0 / hw_rx.tau_c)


def elementary_link(
    hw_tx: HardwareParams,
    hw_rx: HardwareParams,
    p_T: float,
    storage_time: float,
    visibility_per_photon: bool = False,
) -> LinkState:
    """Build the link-state coefficients for one elementary link."""
    if not (0.0 <= p_T <= 1.0):
        raise SatchainError("p_T must lie in [0, 1]")
    if storage_time < 0.0:
        raise SatchainError("storage_time must be >= 0")
    p_link, clean, garbage = heralding_terms(hw_tx, hw_rx, p_T)
    p_link = float(p_link)
    if p_link == 0.0:
        raise InfeasibleLinkError("link has zero heralding probability")

    gamma = float(garbage) / p_link
    remaining = float(clean) / p_link
    vis = hw_rx.visibility
    if visibility_per_photon:
        vis *= hw_tx.visibility
    decay = math.exp(-storage_time / effective_tau(hw_tx, hw_rx))
    alpha = remaining * vis * decay
    beta = remaining * (1.0 - vis * decay)
    return LinkState(alpha=alpha, beta=beta, gamma=gamma, p_link=p_link, storage_time=storage_time)


def _as_end_state(state: LinkState | EndToEndState) -> EndToEndState:
    if isinstance(state, EndToEndState):
        return state
    return EndToEndState(A=state.alpha, B=state.beta, C=state.gamma, swap_power=1.0)


def swap_links(left: LinkState | EndToEndState, right: LinkState, p_swap: float) -> EndToEndState:
    """Ideal-swap composition on the mixture coefficients.

    The (1 - p_swap^n) garbage reassignment of failed swaps stays symbolic in
    swap_power and is applied only in the fidelity.
    """
    l = _as_end_state(left)
    a_r, b_r = right.alpha, right.beta
    A = l.A * a_r
    B = l.A * b_r + l.B * a_r + l.B * b_r
    C = 1.0 - (l.A + l.B) * (a_r + b_r)
    return EndToEndState(A=A, B=B, C=C, swap_power=l.swap_power * p_swap)


def chain_state(links: list[LinkState], n_sat: int, p_swap: float) -> EndToEndState:
    if len(links) != n_sat + 1:
        raise SatchainError("need exactly n_sat + 1 elementary links")
    state: LinkState | EndToEndState = _as_end_state(links[0])
    for link in links[1:]:
        state = swap_links(state, link, p_swap)
    return state
