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
Worst-case polarization contrast of the BB84 transmitter/receiver chains.

The H and V states cross the transmitted port of the transmitter and
receiver beam splitters; the D and M states cross the reflected ports,
sandwiched between two half wave plates:

    HV path: P1 -> BS_t(tx) -> BS_t(rx) -> P2
    DM path: P1 -> HWP1 -> BS_r(tx) -> BS_r(rx) -> HWP2 -> P2

A `ToleranceBox` gives the manufacturing tolerances of every element.
`worst_case_contrast` walks every corner of the box and keeps the worst
basis contrast.

"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

from .errors import ParameterValidationError
from .stokes import (STATE_ANGLES, BeamSplitterSpec, OpticalElement, OpticalTrain,
                     WavePlateSpec, contrast, polarizer_element)

logger = logging.getLogger(__name__)

ARCMINUTE = math.pi / (180 * 60)


@dataclass(frozen=True)
class ToleranceBox:
    """
    Manufacturing tolerances of the optical elements of both paths.

    :Args:

        epsilon: float, optional
            Amplitude extinction of both polarizers (power extinction ratio
            `epsilon ** 2`). Defaults to 0.01.
        mount_error: float, optional
            Rotation accuracy of polarizer and wave plate mounts, in radians.
            Defaults to 5 arc minutes.
        retardance_error: float, optional
            Retardance accuracy of the half wave plates, in radians.
            Defaults to 2 * pi / 300.
        split_ratio: (float, float), optional
            Range of the p and s power fractions of every splitter port.
            Defaults to (0.45, 0.55).
        phase: (float, float), optional
            Range of the p/s phase difference of every splitter port, in
            radians. Defaults to (7, 9) degrees.

    """
    epsilon: float = 0.01
    mount_error: float = 5 * ARCMINUTE
    retardance_error: float = 2 * math.pi / 300
    split_ratio: Tuple[float, float] = (0.45, 0.55)
    phase: Tuple[float, float] = (math.radians(7.0), math.radians(9.0))

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ParameterValidationError("epsilon must lie in [0, 1]", field="epsilon")
        if self.mount_error < 0.0 or self.retardance_error < 0.0:
            raise ParameterValidationError("angular tolerances must be non-negative", field="mount_error")
        lo, hi = self.split_ratio
        if not 0.0 <= lo <= hi <= 1.0:
            raise ParameterValidationError("split_ratio must be an ordered pair within [0, 1]",
                                           field="split_ratio")
        if self.phase[0] > self.phase[1]:
            raise ParameterValidationError("phase must be an ordered pair", field="phase")


ORDINARY_OPTICS = ToleranceBox()
OPTIMAL_OPTICS = ToleranceBox(split_ratio=(0.495, 0.505),
                              phase=(math.radians(-0.3), math.radians(0.3)))
TOLERANCE_PRESETS = {"ordinary": ORDINARY_OPTICS, "optimal": OPTIMAL_OPTICS}


@dataclass(frozen=True)
class ContrastReport:
    """
    Result of a tolerance-box search.

    `p_hv` and `p_dm` are the worst basis contrasts (each the mean over
    the two states of the basis), `p` the four-state mean.

    """
    p_hv: float
    p_dm: float
    hv_corner: dict = field(default_factory=dict)
    dm_corner: dict = field(default_factory=dict)
    corners: int = 0

    @property
    def p(self):
        """float. Four-state mean contrast."""
        return 0.5 * (self.p_hv + self.p_dm)


def hv_train(state, epsilon=0.0, source_error=0.0, analyzer_error=0.0,
             tx_splitter=BeamSplitterSpec(), rx_splitter=BeamSplitterSpec()):
    """
    Default HV path for state H or V, analyzer aligned with the state.
    """
    if state not in ("H", "V"):
        raise ParameterValidationError("the HV path carries H or V, got %r" % (state,), field="state")
    angle = STATE_ANGLES[state]
    return OpticalTrain([polarizer_element(epsilon, angle + source_error),
                         OpticalElement("bs_t", tx_splitter),
                         OpticalElement("bs_t", rx_splitter),
                         polarizer_element(epsilon, angle + analyzer_error)], path_label="HV")


def dm_train(state, epsilon=0.0, source_error=0.0, analyzer_error=0.0,
             tx_waveplate=WavePlateSpec(math.pi, math.pi / 4),
             rx_waveplate=WavePlateSpec(math.pi, math.pi / 4),
             tx_splitter=BeamSplitterSpec(), rx_splitter=BeamSplitterSpec()):
    """
    Default DM path for state D or M, analyzer aligned with the state.
    """
    if state not in ("D", "M"):
        raise ParameterValidationError("the DM path carries D or M, got %r" % (state,), field="state")
    angle = STATE_ANGLES[state]
    return OpticalTrain([polarizer_element(epsilon, angle + source_error),
                         OpticalElement("waveplate", tx_waveplate),
                         OpticalElement("bs_r", tx_splitter),
                         OpticalElement("bs_r", rx_splitter),
                         OpticalElement("waveplate", rx_waveplate),
                         polarizer_element(epsilon, angle + analyzer_error)], path_label="DM")


def _signs(error):
    return (-error, error)


def splitter_corners(box, port):
    """
    Return every extreme splitter of `box` for `port` ("bs_t" or "bs_r").
    """
    corners = []
    for p, s, phi in itertools.product(box.split_ratio, box.split_ratio, box.phase):
        if port == "bs_r":
            corners.append(BeamSplitterSpec.reflecting(p, s, phi))
        else:
            corners.append(BeamSplitterSpec.transmitting(p, s, phi))
    return corners


def halfwave_corners(box):
    """Return every extreme half wave plate of `box`, fast axis near 45 degrees."""
    return [WavePlateSpec(math.pi + dd, math.pi / 4 + da)
            for dd in _signs(box.retardance_error) for da in _signs(box.mount_error)]


def worst_hv_contrast(box):
    """Worst mean(P_H, P_V) over the corners of `box`; returns (p, corner, count)."""
    best, corner, count = -1.0, {}, 0
    mounts = _signs(box.mount_error)
    splitters = splitter_corners(box, "bs_t")
    for h_err, v_err, a_err, tx, rx in itertools.product(mounts, mounts, mounts, splitters, splitters):
        p_h = contrast(hv_train("H", box.epsilon, h_err, a_err, tx, rx), "H")
        p_v = contrast(hv_train("V", box.epsilon, v_err, a_err, tx, rx), "V")
        count += 1
        mean = 0.5 * (p_h + p_v)
        if mean > best:
            best = mean
            corner = {"P_H": p_h, "P_V": p_v, "source_error_H": h_err, "source_error_V": v_err,
                      "analyzer_error": a_err, "tx_splitter": tx, "rx_splitter": rx}
    return best, corner, count


def worst_dm_contrast(box):
    """Worst mean(P_D, P_M) over the corners of `box`; returns (p, corner, count)."""
    best, corner, count = -1.0, {}, 0
    mounts = _signs(box.mount_error)
    plates = halfwave_corners(box)
    splitters = splitter_corners(box, "bs_r")
    for d_err, m_err, a_err, hwp1, hwp2, tx, rx in itertools.product(mounts, mounts, mounts, plates,
                                                                      plates, splitters, splitters):
        p_d = contrast(dm_train("D", box.epsilon, d_err, a_err, hwp1, hwp2, tx, rx), "D")
        p_m = contrast(dm_train("M", box.epsilon, m_err, a_err, hwp1, hwp2, tx, rx), "M")
        count += 1
        mean = 0.5 * (p_d + p_m)
        if mean > best:
            best = mean
            corner = {"P_D": p_d, "P_M": p_m, "source_error_D": d_err, "source_error_M": m_err,
                      "analyzer_error": a_err, "tx_waveplate": hwp1, "rx_waveplate": hwp2,
                      "tx_splitter": tx, "rx_splitter": rx}
    return best, corner, count


def worst_case_contrast(box=ORDINARY_OPTICS):
    """
    Search every corner of `box` for the worst polarization contrast.

    Element errors are shared by the states that cross the same hardware:
    D and M share wave plates, splitters and analyzer, H and V share
    splitters and analyzer. Each transmitter polarizer has its own mount
    error.

    :Args:

        box: ToleranceBox, optional
            Tolerances to explore. Defaults to ORDINARY_OPTICS.

    >>> report = worst_case_contrast(OPTIMAL_OPTICS)
    >>> 2e-4 < report.p < 2.6e-4
    True

    """
    p_hv, hv_corner, n_hv = worst_hv_contrast(box)
    p_dm, dm_corner, n_dm = worst_dm_contrast(box)
    report = ContrastReport(p_hv, p_dm, hv_corner, dm_corner, n_hv + n_dm)
    logger.debug("worst-case contrast over %d corners: P_HV=%.6g P_DM=%.6g P=%.6g",
                 report.corners, p_hv, p_dm, report.p)
    return report


if __name__ == "__main__":
    for name, box in TOLERANCE_PRESETS.items():
        report = worst_case_contrast(box)
        print("%-9s P_HV=%.4g  P_DM=%.4g  P=%.4g" % (name, report.p_hv, report.p_dm, report.p))
