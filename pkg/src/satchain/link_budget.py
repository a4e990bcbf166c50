"""Per-photon transmission budget for one elementary link.

The transmitted mode is a fundamental Gaussian beam launched with waist
waist_ratio * aperture_radius.  Transmitter pointing jitter displaces the beam
center on the receiver plane by a Rayleigh-distributed radial offset
(sigma_offset = link_length * pointing_sigma).  Atmospheric attenuation applies
only to ground links and is a calibratable zenith transmittance raised to the
airmass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ive

from .constants import AIRMASS_SCALE_HEIGHT, EARTH_RADIUS
from .errors import SatchainError


@dataclass(frozen=True)
class TerminalSpec:
    aperture_radius: float
    pointing_sigma: float
    internal_transmittance: float = 0.9
    wavelength: float = 780e-9
    waist_ratio: float = 0.89   # transmit waist / aperture radius

    def __post_init__(self):
        if self.aperture_radius <= 0.0:
            raise SatchainError("aperture_radius must be > 0")
        if self.pointing_sigma < 0.0:
            raise SatchainError("pointing_sigma must be >= 0")
        if not (0.0 < self.internal_transmittance <= 1.0):
            raise SatchainError("internal_transmittance must be in (0, 1]")
        if self.wavelength <= 0.0:
            raise SatchainError("wavelength must be > 0")
        if self.waist_ratio <= 0.0:
            raise SatchainError("waist_ratio must be > 0")


@dataclass(frozen=True)
class AtmosphereSpec:
    zenith_transmittance: float = 1.0
    turbulence_widening: float = 1.0
    enabled: bool = True

    def __post_init__(self):
        if not (0.0 < self.zenith_transmittance <= 1.0):
            raise SatchainError("zenith_transmittance must be in (0, 1]")
        if self.turbulence_widening < 1.0:
            raise SatchainError("turbulence_widening must be >= 1")


@dataclass(frozen=True)
class LinkBudgetResult:
    p_diffraction: float
    p_jitter: float
    p_atmosphere: float
    p_terminal: float
    p_T: float
    beam_waist_at_rx: float
    w_over_sigma_offset: float
    rx_aperture_radius: float
    sigma_offset: float


def beam_radius(tx: TerminalSpec, link_length: float) -> float:
    """Gaussian beam 1/e^2 radius after propagating link_length."""
    if link_length <= 0.0:
        raise SatchainError("link_length must be > 0")
    w0 = tx.waist_ratio * tx.aperture_radius
    rayleigh = math.pi * w0**2 / tx.wavelength
    return w0 * math.sqrt(1.0 + (link_length / rayleigh) ** 2)


def gaussian_collection(tx: TerminalSpec, rx_aperture_radius: float, link_length: float) -> tuple[float, float]:
    """On-axis encircled power of the far beam on the receiver aperture.

    Returns (p_diffraction, beam_waist_at_rx).
    """
    w = beam_radius(tx, link_length)
    p = 1.0 - math.exp(-2.0 * rx_aperture_radius**2 / w**2)
    return p, w


@lru_cache(maxsize=8)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=8)
def _laggauss(n: int):
    return np.polynomial.laguerre.laggauss(n)


def offset_collection(rx_aperture_radius: float, w: float, offset):
    """Encircled power of a Gaussian beam of radius w displaced by `offset`
    from the center of a circular aperture.  Vectorized over `offset`.

    T(d) = (4 / w^2) * int_0^a r exp(-2 (r - d)^2 / w^2) I0e(4 r d / w^2) dr
    with I0e the exponentially scaled modified Bessel function.
    """
    a = rx_aperture_radius
    d = np.asarray(offset, dtype=float)
    x, wts = _leggauss(200)
    r = 0.5 * a * (x + 1.0)                      # (q,)
    rw = 0.5 * a * wts
    rr = r[np.newaxis, :]
    dd = d.reshape(-1, 1)
    integrand = rr * np.exp(-2.0 * (rr - dd) ** 2 / w**2) * ive(0, 4.0 * rr * dd / w**2)
    out = (4.0 / w**2) * integrand @ rw
    if np.ndim(offset) == 0:
        return float(out[0])
    return out.reshape(np.shape(offset))


def jitter_average(p_profile, sigma_offset: float, n_nodes: int = 96) -> float:
    """Average of a radial transmission profile over the pointing-jitter pdf.

    The 2-D centered Gaussian jitter reduces to a Rayleigh radial density;
    substituting u = d^2 / (2 sigma^2) turns the average into a
    Gauss-Laguerre quadrature.  sigma_offset = 0 returns p_profile(0).
    """
    if sigma_offset < 0.0:
        raise SatchainError("sigma_offset must be >= 0")
    if sigma_offset == 0.0:
        return float(p_profile(0.0))
    u, wts = _laggauss(n_nodes)
    d = sigma_offset * np.sqrt(2.0 * u)
    values = np.asarray(p_profile(d), dtype=float)
    return float(np.dot(wts, values))


def _airmass(elevation: float) -> float:
    """Flat-slab airmass, replaced by a spherical-shell path below 15 deg."""
    if elevation >= math.radians(15.0):
        return 1.0 / math.sin(elevation)
    r = EARTH_RADIUS
    h = AIRMASS_SCALE_HEIGHT
    s = -r * math.sin(elevation) + math.sqrt((r * math.sin(elevation)) ** 2 + 2.0 * r * h + h**2)
    return s / h


def atmospheric_transmittance(atm: AtmosphereSpec, elevation: float) -> float:
    if not atm.enabled:
        return 1.0
    if not (0.0 < elevation <= math.pi / 2):
        raise SatchainError("elevation must lie in (0, pi/2]")
    return atm.zenith_transmittance ** _airmass(elevation)


def link_transmission(
    tx: TerminalSpec,
    rx: TerminalSpec,
    atm: AtmosphereSpec,
    link_length: float,
    elevation: float | None = None,
) -> LinkBudgetResult:
    """Compose diffraction, jitter, atmosphere, and terminal factors."""
    if atm.enabled and elevation is None:
        raise SatchainError("atmospheric links require an elevation angle")
    _, w = gaussian_collection(tx, rx.aperture_radius, link_length)
    if atm.enabled:
        w *= atm.turbulence_widening
    a = rx.aperture_radius
    p_diffraction = 1.0 - math.exp(-2.0 * a**2 / w**2)

    sigma_offset = link_length * tx.pointing_sigma
    averaged = jitter_average(lambda d: offset_collection(a, w, d), sigma_offset)
    p_jitter = min(averaged / p_diffraction, 1.0)

    p_atmosphere = atmospheric_transmittance(atm, elevation) if atm.enabled else 1.0
    p_terminal = tx.internal_transmittance * rx.internal_transmittance
    p_T = p_diffraction * p_jitter * p_atmosphere * p_terminal
    return LinkBudgetResult(
        p_diffraction=p_diffraction,
        p_jitter=p_jitter,
        p_atmosphere=p_atmosphere,
        p_terminal=p_terminal,
        p_T=p_T,
        beam_waist_at_rx=w,
        w_over_sigma_offset=w / sigma_offset if sigma_offset > 0.0 else math.inf,
        rx_aperture_radius=a,
        sigma_offset=sigma_offset,
    )


def calibrate_zenith_transmittance(
    cases: list[tuple[TerminalSpec, TerminalSpec, float, float, float]],
) -> float:
    """One-scalar atmospheric calibration.

    Each case is (tx, rx, link_length, elevation, target_p_T).  Returns the
    zenith transmittance minimizing the summed squared log error over the
    cases, assuming every case sits at its stated elevation.  With a single
    shared airmass the optimum has the closed form
    exp(mean(log target - log model_without_atmosphere) / airmass).
    """
    if not cases:
        raise SatchainError("calibration needs at least one case")
    logs = []
    for tx, rx, length, elevation, target in cases:
        clear = link_transmission(tx, rx, AtmosphereSpec(enabled=False), length, None)
        airmass = _airmass(elevation)
        logs.append((math.log(target) - math.log(clear.p_T)) / airmass)
    value = math.exp(sum(logs) / len(logs))
    if not (0.0 < value <= 1.0):
        raise SatchainError(f"calibration produced invalid transmittance {value}")
    return value
