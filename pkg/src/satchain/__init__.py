"""Entanglement rate and fidelity simulator for a satellite repeater chain."""

__version__ = "0.1.0"

from .errors import (
    GeometryError,
    InfeasibleGeometryError,
    InfeasibleLinkError,
    SatchainError,
    ScenarioError,
)
from .geometry import ChainGeometry, ConstellationSpec, pass_window, place_chain
from .link_budget import (
    AtmosphereSpec,
    LinkBudgetResult,
    TerminalSpec,
    atmospheric_transmittance,
    gaussian_collection,
    jitter_average,
    link_transmission,
)
from .quantum import (
    EndToEndState,
    HardwareParams,
    LinkState,
    chain_state,
    elementary_link,
    swap_links,
)
from .rate import (
    ChainConfig,
    PairDistribution,
    RateResult,
    average_rate,
    end_to_end_distribution,
    find_min_modes,
    link_distribution,
    loss_thinning,
    pair_loss_probability,
)
from .montecarlo import McConfig, McResult, simulate_chain, simulate_link
from .scenario import ScenarioFile, parse_scenario, scenario_hash, serialize
