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
Detection rates and quantum bit error rate of the underwater BB84 link.

The receiver has four detectors split in two basis groups. For one group,
per second,

    signal     = mu eta eta_opt exp(-chi_c r) / (2 dt)
    dark_group = 2 I_dc
    bg_group   = L A dt' lambda dlambda Omega eta eta_opt / (2 h c dt)
    scatter    = N

and the modified QBER is

    (P signal + P_s N + I_dc + bg_group / 2) / (signal + dark_group + bg_group + N).

The legacy QBER keeps the same structure but drops eta_opt from the signal
and both efficiencies from the background.

"""
from __future__ import annotations

import dataclasses
import logging
import math
import numbers
from dataclasses import dataclass

from .channel import (CONSTANTS, ReceiverGeometry, background_rate, link_transmittance,
                      receiver_depth)
from .errors import ConfigError, NoCountsError, ParameterValidationError
from .radiance import RadianceTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemParams:
    """
    Transmitter, receiver and detector parameters. Defaults are the
    ordinary system in Jerlov I water.

    :Args:

        P: float, optional
            Polarization contrast, between 0 and 0.5. Defaults to 0.017.
        mu: float, optional
            Mean photon number per pulse. Defaults to 0.1.
        eta: float, optional
            Detector efficiency. Defaults to 0.2.
        eta_opt: float, optional
            Transmittance of the receiver optics. Defaults to 0.95.
        f: float, optional
            Pulse rate, Hz. Defaults to 40 MHz.
        dt_gate: float, optional
            Detector gate time, s. Defaults to 5 ns.
        I_dc: float, optional
            Dark counts per second of one detector. Defaults to 100.
        wavelength: float, optional
            Signal wavelength, m. Defaults to 480 nm.
        dlambda: float, optional
            Filter bandwidth, nm. Defaults to 1.
        gamma: float, optional
            Full field of view, rad. Defaults to 10 mrad.
        A: float, optional
            Aperture area, m2. Defaults to 30 cm2.
        chi_c: float, optional
            Beam attenuation coefficient, 1/m. Defaults to 0.03.
        N_scatter: float, optional
            Scattered signal counts per second. Defaults to 0.
        P_s: float, optional
            Error probability of scattered photons. Defaults to 0.

    """
    P: float = 0.017
    mu: float = 0.1
    eta: float = 0.2
    eta_opt: float = 0.95
    f: float = 40e6
    dt_gate: float = 5e-9
    I_dc: float = 100.0
    wavelength: float = 480e-9
    dlambda: float = 1.0
    gamma: float = 10e-3
    A: float = 30e-4
    chi_c: float = 0.03
    N_scatter: float = 0.0
    P_s: float = 0.0

    def __post_init__(self):
        for name in ("P", "mu", "eta", "eta_opt", "f", "dt_gate", "I_dc", "wavelength",
                     "dlambda", "gamma", "A", "chi_c", "N_scatter", "P_s"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise ParameterValidationError("%s must be a number, got %r" % (name, value), field=name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ParameterValidationError("%s must be finite and non-negative, got %r"
                                               % (name, value), field=name)
        if self.P > 0.5:
            raise ParameterValidationError("P must lie in [0, 0.5], got %r" % self.P, field="P")
        if self.P_s > 1.0:
            raise ParameterValidationError("P_s must lie in [0, 1], got %r" % self.P_s, field="P_s")
        for name in ("eta", "eta_opt"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ParameterValidationError("%s must lie in (0, 1]" % name, field=name)
        for name in ("mu", "f", "wavelength", "chi_c"):
            if getattr(self, name) == 0.0:
                raise ParameterValidationError("%s must be positive" % name, field=name)
        if self.gamma > math.pi:
            raise ParameterValidationError("gamma must lie in [0, pi]", field="gamma")

    @property
    def dt(self):
        """float. Pulse period 1/f, s."""
        return 1.0 / self.f

    def geometry(self):
        """Receiver geometry carried by these parameters."""
        return ReceiverGeometry(self.A, self.gamma)

    def replace(self, **changes):
        """Return a copy with some fields replaced (validated again)."""
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class RateBreakdown:
    """Click rates of one basis group, counts/s."""
    signal: float
    dark_group: float
    bg_group: float
    scatter: float
    clamped: bool = False

    @property
    def total(self):
        return self.signal + self.dark_group + self.bg_group + self.scatter


@dataclass(frozen=True)
class QberBreakdown:
    """QBER split by error source. Components share one denominator."""
    q_opt: float
    q_dc: float
    q_bac: float
    q_scatter: float
    legacy: bool = False
    clamped: bool = False

    @property
    def total(self):
        return self.q_opt + self.q_dc + self.q_bac + self.q_scatter

    def as_row(self, r):
        return {"r_m": r, "q_opt": self.q_opt, "q_dc": self.q_dc, "q_bac": self.q_bac,
                "q_scatter": self.q_scatter, "q_total": self.total}


def _breakdown(system, scenario, geometry, table, r, legacy):
    if r < 0:
        raise ParameterValidationError("distance must be non-negative, got %r" % (r,), field="r")
    _check_chi(system, scenario)
    if geometry is None:
        geometry = system.geometry()
    if table is None:
        table = RadianceTable.bundled()
    transmittance = link_transmittance(system.chi_c, r)
    if legacy:
        signal = system.mu * system.eta * transmittance / (2.0 * system.dt)
    else:
        signal = system.mu * system.eta * system.eta_opt * transmittance / (2.0 * system.dt)
    lookup = table.lookup(scenario, receiver_depth(scenario, r))
    background = background_rate(lookup.value, geometry, system, CONSTANTS, efficiency=not legacy)
    return RateBreakdown(signal, 2.0 * system.I_dc, background.group, system.N_scatter,
                         lookup.clamped)


def rates(system, scenario, geometry=None, table=None, r=0.0):
    """
    Click rates of one basis group at range `r` metres.

    :Args:

        system: SystemParams
            Link hardware.
        scenario: ChannelScenario
            Water, propagation mode and moon phase.
        geometry: ReceiverGeometry, optional
            Receiver optics. Defaults to the aperture and field of view of
            `system`.
        table: RadianceTable, optional
            Background radiance. Defaults to the bundled table.
        r: float
            Link range, m.

    """
    return _breakdown(system, scenario, geometry, table, r, legacy=False)


def _qber(system, breakdown, legacy):
    total = breakdown.total
    if total <= 0.0:
        raise NoCountsError("no counts: the link registers no clicks")
    return QberBreakdown(system.P * breakdown.signal / total,
                         system.I_dc / total,
                         0.5 * breakdown.bg_group / total,
                         system.P_s * breakdown.scatter / total,
                         legacy, breakdown.clamped)


def qber_modified(system, scenario, geometry=None, table=None, r=0.0):
    """
    QBER with the detector and optics efficiencies applied to every term.
    """
    return _qber(system, _breakdown(system, scenario, geometry, table, r, False), False)


def qber_legacy(system, scenario, geometry=None, table=None, r=0.0):
    """
    QBER of the earlier formulation: eta_opt missing from the signal and
    no efficiency on the background.
    """
    return _qber(system, _breakdown(system, scenario, geometry, table, r, True), True)


class LinkBudget:
    """
    Link budget of one underwater BB84 link.

    Holds the system, scenario, geometry and radiance table and evaluates
    rates, QBER and gains at any range.

    :Args:

        system: SystemParams
            Link hardware.
        scenario: ChannelScenario
            Water, propagation mode and moon phase. Its `chi_c` must match
            the one of `system`.
        geometry: ReceiverGeometry, optional
            Receiver optics. Defaults to the aperture and field of view of
            `system`.
        table: RadianceTable, optional
            Background radiance. Defaults to the bundled table.

    >>> from uwqkd.channel import ChannelScenario
    >>> link = LinkBudget(SystemParams(), ChannelScenario(mode="U"))
    >>> round(link.rates(100.0).signal)
    18919

    """
    def __init__(self, system, scenario, geometry=None, table=None):
        _check_chi(system, scenario)
        # Raw arguments so that we can retrieve them with the attribute syntax.
        self._system = system
        self._scenario = scenario
        self._geometry = geometry
        self._table = table

    def setSystem(self, x):
        """
        Replace the `system` attribute.

        :Args:

            x: SystemParams
                New `system` attribute.

        """
        _check_chi(x, self._scenario)
        self._system = x

    def setScenario(self, x):
        """
        Replace the `scenario` attribute.

        :Args:

            x: ChannelScenario
                New `scenario` attribute.

        """
        _check_chi(self._system, x)
        self._scenario = x

    def setGeometry(self, x):
        """
        Replace the `geometry` attribute.

        :Args:

            x: ReceiverGeometry or None
                New `geometry` attribute.

        """
        self._geometry = x

    def setTable(self, x):
        """
        Replace the `table` attribute.

        :Args:

            x: RadianceTable or None
                New `table` attribute.

        """
        self._table = x

    def rates(self, r):
        """Click rates of one basis group at `r` metres."""
        return rates(self._system, self._scenario, self.geometry, self.table, r)

    def qber(self, r, legacy=False):
        """QBER breakdown at `r` metres, legacy formula if `legacy` is True."""
        if legacy:
            return qber_legacy(self._system, self._scenario, self.geometry, self.table, r)
        return qber_modified(self._system, self._scenario, self.geometry, self.table, r)

    def gain(self, r, intensity=None):
        """GainPoint of pulses of mean photon number `intensity` at `r` metres."""
        from .keyrate import gain_point
        if intensity is None:
            intensity = self._system.mu
        return gain_point(self._system, self._scenario, self.geometry, self.table, r, intensity)

    def transmittance(self, r):
        """Beer-Lambert transmittance over `r` metres."""
        return link_transmittance(self._system.chi_c, r)

    def snapshot(self):
        """Return the immutable (system, scenario, geometry, table) inputs."""
        return self._system, self._scenario, self.geometry, self.table

    @property
    def system(self):
        """SystemParams. Link hardware."""
        return self._system
    @system.setter
    def system(self, x): self.setSystem(x)

    @property
    def scenario(self):
        """ChannelScenario. Water, mode and moon phase."""
        return self._scenario
    @scenario.setter
    def scenario(self, x): self.setScenario(x)

    @property
    def geometry(self):
        """ReceiverGeometry. Receiver optics."""
        if self._geometry is None:
            return self._system.geometry()
        return self._geometry
    @geometry.setter
    def geometry(self, x): self.setGeometry(x)

    @property
    def table(self):
        """RadianceTable. Background radiance."""
        if self._table is None:
            self._table = RadianceTable.bundled()
        return self._table
    @table.setter
    def table(self, x): self.setTable(x)


def _check_chi(system, scenario):
    if not math.isclose(system.chi_c, scenario.chi_c, rel_tol=1e-12):
        raise ConfigError("chi_c of the system (%g /m) and of the scenario (%g /m) differ"
                          % (system.chi_c, scenario.chi_c))


if __name__ == "__main__":
    from .channel import ChannelScenario, PropagationMode
    system = SystemParams()
    for mode in PropagationMode:
        link = LinkBudget(system, ChannelScenario(mode=mode))
        modified, legacy = link.qber(100.0), link.qber(100.0, legacy=True)
        print("%-10s QBER(100 m) modified=%.4f legacy=%.4f" % (mode.name, modified.total, legacy.total))
