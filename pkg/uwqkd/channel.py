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
Seawater channel: Beer-Lambert transmittance, propagation-mode geometry
and the background photon rate collected by the receiver.

"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy import constants as sc

from .errors import ParameterValidationError

logger = logging.getLogger(__name__)


class _LabelledEnum(enum.Enum):
    """Enum parsed from its value, its name or any of its aliases."""

    @classmethod
    def parse(cls, label):
        if isinstance(label, cls):
            return label
        key = str(label).strip().lower().replace("_", "").replace("-", "").replace(" ", "")
        for member in cls:
            if key in member.aliases:
                return member
        raise ParameterValidationError("unknown %s %r (expected one of %s)"
                                       % (cls.__name__, label, ", ".join(m.value for m in cls)),
                                       field=cls.__name__)

    @property
    def aliases(self):
        return {self.value.lower(), self.name.lower().replace("_", "")} | set(self._extra_aliases())

    def _extra_aliases(self):
        return ()


class WaterType(_LabelledEnum):
    JERLOV_I = "I"
    JERLOV_II = "II"

    def _extra_aliases(self):
        return {"jerlovi": ("1", "typei"), "jerlovii": ("2", "typeii")}[self.name.lower().replace("_", "")]

    @property
    def nominal_chi(self):
        """float. Beam attenuation coefficient at 480 nm, 1/m."""
        return {"I": 0.03, "II": 0.18}[self.value]


class PropagationMode(_LabelledEnum):
    UPWARD = "U"
    DOWNWARD = "D"
    HORIZONTAL = "H"


class LunarPhase(_LabelledEnum):
    FULL_MOON = "full"
    GIBBOUS = "gibbous"
    QUARTER = "quarter"


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants used by the photon-counting formulas."""
    h: float = sc.h
    c: float = sc.c

    @property
    def hc(self):
        return self.h * self.c


CONSTANTS = PhysicalConstants()

# Receiver depth used when the scenario does not fix one.
DEFAULT_FIXED_DEPTH = {PropagationMode.UPWARD: 1.0, PropagationMode.HORIZONTAL: 100.0,
                       PropagationMode.DOWNWARD: 0.0}


@dataclass(frozen=True)
class ChannelScenario:
    """
    Water body and link geometry.

    :Args:

        water_type: WaterType or str, optional
            Jerlov water type. Defaults to Jerlov I.
        chi_c: float, optional
            Beam attenuation coefficient, 1/m. Defaults to 0.03.
        mode: PropagationMode or str, optional
            Direction of the quantum signal. Defaults to Downward.
        lunar_phase: LunarPhase or str, optional
            Moon phase of the background sky. Defaults to full moon.
        tx_depth: float, optional
            Transmitter depth of the downward mode, m. Defaults to 1.
        rx_fixed_depth: float, optional
            Receiver depth of the upward and horizontal modes, m. Defaults
            to 1 m (upward) or 100 m (horizontal).

    """
    water_type: WaterType = WaterType.JERLOV_I
    chi_c: float = 0.03
    mode: PropagationMode = PropagationMode.DOWNWARD
    lunar_phase: LunarPhase = LunarPhase.FULL_MOON
    tx_depth: float = 1.0
    rx_fixed_depth: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "water_type", WaterType.parse(self.water_type))
        object.__setattr__(self, "mode", PropagationMode.parse(self.mode))
        object.__setattr__(self, "lunar_phase", LunarPhase.parse(self.lunar_phase))
        if not (math.isfinite(self.chi_c) and self.chi_c > 0.0):
            raise ParameterValidationError("chi_c must be positive, got %r" % (self.chi_c,), field="chi_c")
        if not self.tx_depth >= 0.0:
            raise ParameterValidationError("tx_depth must be non-negative", field="tx_depth")
        if self.rx_fixed_depth is not None and not self.rx_fixed_depth >= 0.0:
            raise ParameterValidationError("rx_fixed_depth must be non-negative", field="rx_fixed_depth")

    @property
    def fixed_depth(self):
        """float. Receiver depth of the upward and horizontal modes, m."""
        if self.rx_fixed_depth is not None:
            return self.rx_fixed_depth
        return DEFAULT_FIXED_DEPTH[self.mode]

    @property
    def key(self):
        """tuple. (mode, lunar phase, water type) radiance series key."""
        return (self.mode, self.lunar_phase, self.water_type)


@dataclass(frozen=True)
class ReceiverGeometry:
    """
    Receiver collecting optics.

    :Args:

        aperture: float, optional
            Aperture area A, m2. Defaults to 30 cm2.
        gamma: float, optional
            Full field of view, rad. Defaults to 10 mrad.

    """
    aperture: float = 30e-4
    gamma: float = 10e-3

    def __post_init__(self):
        if not (math.isfinite(self.aperture) and self.aperture >= 0.0):
            raise ParameterValidationError("aperture must be non-negative", field="aperture")
        if not 0.0 <= self.gamma <= math.pi:
            raise ParameterValidationError("gamma must lie in [0, pi], got %r" % (self.gamma,), field="gamma")

    @property
    def solid_angle(self):
        """float. Solid angle of the field of view, sr."""
        return solid_angle(self.gamma)


@dataclass(frozen=True)
class BackgroundRate:
    """Background clicks per second: basis-group total and error share."""
    group: float
    error_share: float


def link_transmittance(chi_c, r):
    """Beer-Lambert transmittance exp(-chi_c * r) over `r` metres."""
    if r < 0:
        raise ParameterValidationError("distance must be non-negative, got %r" % (r,), field="r")
    return math.exp(-chi_c * r)


def solid_angle(gamma):
    """
    Solid angle of a cone of full angle `gamma`, 2 pi (1 - cos(gamma / 2)).
    """
    if not 0.0 <= gamma <= math.pi:
        raise ParameterValidationError("gamma must lie in [0, pi], got %r" % (gamma,), field="gamma")
    # Same quantity, written without the cancellation of 1 - cos at small angles.
    return 4.0 * math.pi * math.sin(gamma / 4.0) ** 2


def receiver_depth(scenario, r):
    """
    Depth of the receiver when the link spans `r` metres.

    The downward-mode receiver sinks below the stationary transmitter;
    the other modes keep the receiver at a fixed depth.

    """
    if r < 0:
        raise ParameterValidationError("distance must be non-negative, got %r" % (r,), field="r")
    if scenario.mode is PropagationMode.DOWNWARD:
        return scenario.tx_depth + r
    return scenario.fixed_depth


def background_rate(radiance, geometry, system, constants=CONSTANTS, efficiency=True):
    """
    Background click rate of one basis group.

    group = L A dt' lambda dlambda Omega eta eta_opt / (2 h c dt), and the
    error share is half of it. With `efficiency` False the detector and
    optics efficiencies are left out.

    :Args:

        radiance: float
            Spectral radiance, W/(m2 sr nm).
        geometry: ReceiverGeometry
            Aperture and field of view.
        system: SystemParams
            Gate time, pulse period, wavelength, filter bandwidth and
            efficiencies.

    """
    if radiance < 0:
        raise ParameterValidationError("radiance must be non-negative", field="radiance")
    eff = system.eta * system.eta_opt if efficiency else 1.0
    photons = (radiance * geometry.aperture * system.dt_gate * system.wavelength * system.dlambda
               * geometry.solid_angle * eff / constants.hc)
    group = photons / (2.0 * system.dt)
    return BackgroundRate(group, 0.5 * group)


if __name__ == "__main__":
    print("T(0.03/m, 100 m) =", link_transmittance(0.03, 100.0))
    print("Omega(10 mrad)   =", solid_angle(10e-3))
    for mode in PropagationMode:
        scenario = ChannelScenario(mode=mode)
        print("%-10s receiver depth at 250 m: %g m" % (mode.name, receiver_depth(scenario, 250.0)))
