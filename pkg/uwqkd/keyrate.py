# Copyright 2026 The uwqkd-tools developers
#
# This file is part of uwqkd-tools.
#
# uwqkd-tools is free software: you can redistribute it and/or modify it
# under the terms of the GNU Lesser General Public License as published
# by the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# uwqkd-tools is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with uwqkd-tools. If not, see <http://www.gnu.org/licenses/>.

"""
Sifted and secure key rates of the weak coherent pulse BB84 link.

Per pulse, the GLLP key rate is

    q [-Q_mu f(E_mu) H2(E_mu) + Q_1 (1 - H2(e_1))]

with decoy states bounding the single photon gain Q_1 and error e_1, and

    q Q_mu [-f(E_mu) H2(E_mu) + Omega (1 - H2(E_mu / Omega))]

without them, Omega being the untagged fraction of the detections.
Every rate returned here is in bits per second (per-pulse value times the
pulse rate).

"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import entr

from .channel import link_transmittance
from .errors import NoSingleYieldError, ParameterValidationError
from .qber import qber_modified, rates

logger = logging.getLogger(__name__)

OMEGA_CONVENTIONS = ("gllp", "emission")
DECOY_ESTIMATORS = ("ideal", "onedecoy")
KEY_RATE_METHODS = ("sifted", "decoy", "nodecoy", "onedecoy")


@dataclass(frozen=True)
class ProtocolParams:
    """
    Post-processing and decoy settings.

    :Args:

        q: float, optional
            Sifting factor, in (0, 1]. Defaults to 1.
        f_ec: float, optional
            Error correction efficiency f(E_mu), at least 1. Defaults to 1.
        mu: float, optional
            Signal intensity. Defaults to None, the `mu` of the system.
        nu: float, optional
            Decoy intensity of the one-decoy estimator. Defaults to 0.05.
        omega_convention: str, optional
            "gllp" (1 - p_multi / Q_mu) or "emission" (single photon share
            of the non-vacuum pulses). Defaults to "gllp".
        decoy_estimator: str, optional
            Estimator behind the "decoy" rate, "ideal" (infinitely many
            decoys) or "onedecoy". Defaults to "ideal".

    """
    q: float = 1.0
    f_ec: float = 1.0
    mu: Optional[float] = None
    nu: float = 0.05
    omega_convention: str = "gllp"
    decoy_estimator: str = "ideal"

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ParameterValidationError("q must lie in (0, 1], got %r" % (self.q,), field="q")
        if not self.f_ec >= 1.0:
            raise ParameterValidationError("f_ec must be at least 1, got %r" % (self.f_ec,), field="f_ec")
        if self.mu is not None and not self.mu > 0.0:
            raise ParameterValidationError("mu must be positive", field="mu")
        if not self.nu > 0.0:
            raise ParameterValidationError("nu must be positive", field="nu")
        if self.mu is not None and not self.nu < self.mu:
            raise ParameterValidationError("nu must be below mu (%g), got %r" % (self.mu, self.nu), field="nu")
        if self.omega_convention not in OMEGA_CONVENTIONS:
            raise ParameterValidationError("omega_convention must be one of %s"
                                           % ", ".join(OMEGA_CONVENTIONS), field="omega_convention")
        if self.decoy_estimator not in DECOY_ESTIMATORS:
            raise ParameterValidationError("decoy_estimator must be one of %s"
                                           % ", ".join(DECOY_ESTIMATORS), field="decoy_estimator")

    def signal_intensity(self, system):
        """Signal intensity, `mu` if set, the one of `system` otherwise."""
        return system.mu if self.mu is None else self.mu


@dataclass(frozen=True)
class GainPoint:
    """Per-pulse gains and errors of the signal and, optionally, decoy states."""
    Q_mu: float
    E_mu: float
    Q_nu: Optional[float] = None
    E_nu: Optional[float] = None

    def __post_init__(self):
        for name in ("Q_mu", "E_mu", "Q_nu", "E_nu"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ParameterValidationError("%s must lie in [0, 1], got %r" % (name, value), field=name)


@dataclass(frozen=True)
class DecoyEstimate:
    """
    Single photon yield Y1, gain Q1 and error e1, with the flag raised
    when e1 was clamped to [0, 1/2].
    """
    Y1: float
    Q1: float
    e1: float
    e1_clamped: bool = False


@dataclass(frozen=True)
class SecureRate:
    """Secure key rate, bits/s, and whether it was clamped at 0."""
    bps: float
    insecure: bool = False

    def __float__(self):
        return self.bps


@dataclass(frozen=True)
class KeyRateReport:
    """
    Sifted rate and the three secure rates of one link at one range.
    """
    r: float
    sifted: float
    decoy: SecureRate
    no_decoy: SecureRate
    one_decoy: SecureRate
    gains: GainPoint
    decoy_estimate: Optional[DecoyEstimate]
    one_decoy_estimate: Optional[DecoyEstimate]
    omega_untagged: float
    flags: dict = field(default_factory=dict)

    @property
    def secure_decoy(self):
        return self.decoy.bps

    @property
    def secure_no_decoy(self):
        return self.no_decoy.bps

    @property
    def secure_one_decoy(self):
        return self.one_decoy.bps

    def secure(self, method):
        """Secure rate of `method`, one of KEY_RATE_METHODS ("sifted" gives the sifted rate)."""
        return self._pick(method).bps

    def _pick(self, method):
        if method == "sifted":
            return SecureRate(self.sifted, False)
        try:
            return {"decoy": self.decoy, "nodecoy": self.no_decoy, "onedecoy": self.one_decoy}[method]
        except KeyError:
            raise ParameterValidationError("unknown key rate method %r (expected one of %s)"
                                           % (method, ", ".join(KEY_RATE_METHODS)), field="method") from None

    def as_row(self, method):
        """CSV row of `method`; intermediates that do not apply are NaN."""
        picked = self._pick(method)
        estimate = None
        if method == "decoy":
            estimate = self.decoy_estimate
        elif method == "onedecoy":
            estimate = self.one_decoy_estimate
        nan = float("nan")
        return {"r_m": self.r, "sifted_bps": self.sifted, "secure_bps": picked.bps,
                "Y1": estimate.Y1 if estimate is not None else nan,
                "Q1": estimate.Q1 if estimate is not None else nan,
                "e1": estimate.e1 if estimate is not None else nan,
                "omega_untagged": self.omega_untagged,
                "insecure_flag": picked.insecure}


def binary_entropy(x):
    """
    Binary entropy H2(x) in bits, 0 at both ends of [0, 1].

    Accepts a scalar or an array; values outside [0, 1] are rejected.

    >>> round(binary_entropy(0.11), 5)
    0.49992

    """
    values = np.asarray(x, dtype=float)
    if np.any(np.isnan(values)) or np.any(values < 0.0) or np.any(values > 1.0):
        raise ParameterValidationError("binary entropy argument must lie in [0, 1], got %r" % (x,),
                                       field="x")
    result = (entr(values) + entr(1.0 - values)) / math.log(2.0)
    if result.ndim == 0:
        return float(result)
    return result


def sifted_rate(system, protocol, r):
    """
    Sifted key rate f mu exp(-chi_c r) q eta / 2 eta_opt, bits/s.

    Independent of the propagation mode.

    """
    mu = protocol.signal_intensity(system)
    return (system.f * mu * link_transmittance(system.chi_c, r) * protocol.q
            * 0.5 * system.eta * system.eta_opt)


def gain_point(system, scenario, geometry, table, r, intensity):
    """
    Gain and QBER of pulses of mean photon number `intensity`.

    The gain is the per-pulse click probability of one basis group, the
    QBER denominator times the pulse period, so that Q and E stay
    consistent.

    """
    if not intensity > 0.0:
        raise ParameterValidationError("intensity must be positive, got %r" % (intensity,),
                                       field="intensity")
    shifted = system.replace(mu=intensity)
    breakdown = rates(shifted, scenario, geometry, table, r)
    if breakdown.total <= 0.0:
        return GainPoint(0.0, 0.0)
    qber = qber_modified(shifted, scenario, geometry, table, r)
    return GainPoint(min(1.0, breakdown.total * system.dt), qber.total)


def untagged_fraction(Q_mu, mu, convention="gllp"):
    """
    Fraction of the detections that come from single photon pulses.

    :Args:

        Q_mu: float
            Gain of the signal states.
        mu: float
            Signal intensity.
        convention: str, optional
            "gllp": max(0, 1 - p_multi / Q_mu) with the Poisson multi
            photon probability p_multi. "emission": single photon share of
            the non-vacuum pulses, mu exp(-mu) / (1 - exp(-mu)).
            Defaults to "gllp".

    """
    if not mu > 0.0:
        raise ParameterValidationError("mu must be positive", field="mu")
    if convention == "gllp":
        if Q_mu <= 0.0:
            return 0.0
        p_multi = -math.expm1(-mu) - mu * math.exp(-mu)
        return max(0.0, 1.0 - p_multi / Q_mu)
    if convention == "emission":
        return mu * math.exp(-mu) / -math.expm1(-mu)
    raise ParameterValidationError("unknown omega convention %r" % (convention,), field="omega_convention")


def secure_rate_decoy(gains, estimate, protocol, pulse_rate):
    """
    GLLP secure key rate with decoy states, bits/s.

    A single photon error above 1/2 gives a zero rate flagged insecure.

    """
    leak = gains.Q_mu * protocol.f_ec * binary_entropy(gains.E_mu)
    if estimate.e1 > 0.5:
        single = 0.0
    else:
        single = estimate.Q1 * (1.0 - binary_entropy(estimate.e1))
    value = protocol.q * pulse_rate * (single - leak)
    return SecureRate(max(0.0, value), value <= 0.0)


def secure_rate_no_decoy(gains, protocol, mu, pulse_rate, convention=None):
    """
    GLLP secure key rate without decoy states, bits/s.

    The single photon term vanishes when the untagged fraction is 0 or
    when E_mu / Omega exceeds 1/2.

    """
    if convention is None:
        convention = protocol.omega_convention
    omega = untagged_fraction(gains.Q_mu, mu, convention)
    leak = protocol.f_ec * binary_entropy(gains.E_mu)
    if omega <= 0.0 or gains.E_mu / omega > 0.5:
        single = 0.0
    else:
        single = omega * (1.0 - binary_entropy(gains.E_mu / omega))
    value = protocol.q * pulse_rate * gains.Q_mu * (single - leak)
    return SecureRate(max(0.0, value), value <= 0.0)


def one_decoy_yield(Q_mu, Q_nu, mu, nu):
    """
    Single photon yield bound of the one-decoy protocol,
    mu / (mu nu - nu^2) (Q_nu exp(nu) - Q_mu exp(mu) nu^2 / mu^2).
    """
    if not 0.0 < nu < mu:
        raise ParameterValidationError("decoy intensities need 0 < nu < mu, got mu=%r nu=%r" % (mu, nu),
                                       field="nu")
    return mu / (mu * nu - nu * nu) * (Q_nu * math.exp(nu) - Q_mu * math.exp(mu) * nu * nu / (mu * mu))


def one_decoy_estimate(Q_mu, E_mu, Q_nu, E_nu, mu, nu):
    """
    Single photon yield, gain and error bounded with one decoy intensity.

    Y1 is floored at 0; a zero yield leaves e1 undefined and raises
    NoSingleYieldError. e1 is clamped to [0, 1/2]. `E_mu` is part of the
    measured pair but does not enter the bound.

    """
    y1 = one_decoy_yield(Q_mu, Q_nu, mu, nu)
    if y1 <= 0.0:
        raise NoSingleYieldError("no single-photon yield (Y1 = %g)" % y1)
    e1 = E_nu * Q_nu * math.exp(nu) / (y1 * nu)
    clamped = not 0.0 <= e1 <= 0.5
    return DecoyEstimate(y1, mu * math.exp(-mu) * y1, min(0.5, max(0.0, e1)), clamped)


def ideal_decoy_estimate(breakdown, system, intensity):
    """
    Asymptotic single photon bounds of a protocol with infinitely many decoys.

    Y1 = Y0 + eta' and e1 = (e0 Y0 + P eta') / Y1, where Y0 is the noise
    click probability of one basis group per pulse and eta' its detection
    probability per signal photon. `breakdown` holds the rates evaluated
    at `intensity`.

    """
    dt = system.dt
    y0 = (breakdown.dark_group + breakdown.bg_group + breakdown.scatter) * dt
    e0y0 = (system.I_dc + 0.5 * breakdown.bg_group + system.P_s * breakdown.scatter) * dt
    eta1 = breakdown.signal * dt / intensity
    y1 = y0 + eta1
    if y1 <= 0.0:
        raise NoSingleYieldError("no single-photon yield (Y1 = 0)")
    e1 = (e0y0 + system.P * eta1) / y1
    return DecoyEstimate(y1, intensity * math.exp(-intensity) * y1, e1)


def key_rate_report(link, protocol, r):
    """
    Sifted and secure key rates of `link` at `r` metres.

    :Args:

        link: LinkBudget
            Link to evaluate.
        protocol: ProtocolParams
            Sifting, error correction and decoy settings.
        r: float
            Link range, m.

    """
    system, scenario, geometry, table = link.snapshot()
    mu = protocol.signal_intensity(system)
    if not protocol.nu < mu:
        raise ParameterValidationError("nu must be below mu (%g), got %r" % (mu, protocol.nu), field="nu")
    signal = gain_point(system, scenario, geometry, table, r, mu)
    decoy = gain_point(system, scenario, geometry, table, r, protocol.nu)
    gains = GainPoint(signal.Q_mu, signal.E_mu, decoy.Q_mu, decoy.E_mu)
    flags = {}

    try:
        ideal = ideal_decoy_estimate(rates(system.replace(mu=mu), scenario, geometry, table, r), system, mu)
    except NoSingleYieldError as err:
        logger.debug("decoy bound at %g m: %s", r, err)
        ideal = None
        flags["no_single_yield"] = True
    try:
        one = one_decoy_estimate(gains.Q_mu, gains.E_mu, gains.Q_nu, gains.E_nu, mu, protocol.nu)
        one_rate = secure_rate_decoy(gains, one, protocol, system.f)
        flags["e1_clamped"] = one.e1_clamped
    except NoSingleYieldError as err:
        logger.debug("one-decoy bound at %g m: %s", r, err)
        one, one_rate = None, SecureRate(0.0, True)
        flags["no_single_yield"] = True

    if protocol.decoy_estimator == "onedecoy":
        estimate, decoy_rate = one, one_rate
    elif ideal is None:
        estimate, decoy_rate = None, SecureRate(0.0, True)
    else:
        estimate, decoy_rate = ideal, secure_rate_decoy(gains, ideal, protocol, system.f)
    omega = untagged_fraction(gains.Q_mu, mu, protocol.omega_convention)
    no_decoy_rate = secure_rate_no_decoy(gains, protocol, mu, system.f)

    return KeyRateReport(r, sifted_rate(system, protocol, r), decoy_rate, no_decoy_rate, one_rate,
                         gains, estimate, one, omega, flags)


if __name__ == "__main__":
    from .channel import ChannelScenario, PropagationMode
    from .qber import LinkBudget, SystemParams
    protocol = ProtocolParams(mu=0.48)
    for mode in PropagationMode:
        report = key_rate_report(LinkBudget(SystemParams(), ChannelScenario(mode=mode)), protocol, 100.0)
        print("%-10s sifted=%.0f decoy=%.0f nodecoy=%.0f onedecoy=%.0f bit/s"
              % (mode.name, report.sifted, report.secure_decoy, report.secure_no_decoy,
                 report.secure_one_decoy))
