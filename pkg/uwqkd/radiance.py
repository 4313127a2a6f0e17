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
Underwater background spectral radiance at 480 nm.

Radiance is tabulated against depth for every (propagation mode, lunar
phase, water type) series and interpolated log-linearly. The bundled
table follows L(d) = L0 exp(-K_d d) with

    L0 = 1e-6 W/(m2 sr nm) looking down from the surface (downward mode),
    L0 = 1e-8 W/(m2 sr nm) for the upward and horizontal modes,

divided by ten for each lunar phase step away from full moon and by ten
for Jerlov II water, with K_d = kd_ratio * chi of the water type.

"""
from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import LunarPhase, PropagationMode, WaterType
from .errors import ParameterValidationError, TableGapError

logger = logging.getLogger(__name__)

RADIANCE_COLUMNS = ("depth_m", "mode", "lunar_phase", "water_type", "radiance_w_m2_sr_nm")
DATA_DIR_ENV = "UWQKD_DATA_DIR"
RADIANCE_FILENAME = "radiance.csv"
BUNDLED_DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

SURFACE_RADIANCE = {PropagationMode.DOWNWARD: 1e-6, PropagationMode.UPWARD: 1e-8,
                    PropagationMode.HORIZONTAL: 1e-8}
PHASE_SCALE = {LunarPhase.FULL_MOON: 1.0, LunarPhase.GIBBOUS: 0.1, LunarPhase.QUARTER: 0.01}
WATER_SCALE = {WaterType.JERLOV_I: 1.0, WaterType.JERLOV_II: 0.1}
DEFAULT_KD_RATIO = 0.5


@dataclass(frozen=True)
class RadianceRow:
    """One tabulated radiance sample."""
    depth: float
    mode: PropagationMode
    lunar_phase: LunarPhase
    water_type: WaterType
    radiance: float

    @property
    def key(self):
        return (self.mode, self.lunar_phase, self.water_type)


@dataclass(frozen=True)
class RadianceLookup:
    """Interpolated radiance and whether the depth fell outside the table."""
    value: float
    clamped: bool = False

    def __float__(self):
        return self.value


class _Series:
    """Depth-sorted samples of one series with their logarithms."""

    def __init__(self, depths, values):
        self.depths = np.asarray(depths, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.log_values = np.log(self.values)

    def lookup(self, depth):
        depths = self.depths
        if depth < depths[0] or depth > depths[-1]:
            index = 0 if depth < depths[0] else -1
            return RadianceLookup(float(self.values[index]), True)
        index = int(np.searchsorted(depths, depth))
        if index < len(depths) and depths[index] == depth:
            return RadianceLookup(float(self.values[index]), False)
        return RadianceLookup(float(np.exp(np.interp(depth, depths, self.log_values))), False)


class RadianceTable:
    """
    Tabulated background radiance with log-linear depth interpolation.

    Tables are immutable once built and can be shared between workers.

    :Args:

        rows: iterable of RadianceRow
            Samples. Within each (mode, phase, water) series the depths
            must be strictly increasing in the given order and every
            radiance must be positive.
        source: str, optional
            Description of where the rows came from, used in messages.
            Defaults to "<memory>".

    >>> from uwqkd.channel import ChannelScenario
    >>> table = RadianceTable.bundled()
    >>> table.lookup(ChannelScenario(mode="Downward"), 0.0).value
    1e-06

    """
    def __init__(self, rows, source="<memory>"):
        self._source = source
        grouped = {}
        for row in rows:
            if not (math.isfinite(row.radiance) and row.radiance > 0.0):
                raise TableGapError("%s: radiance must be positive, got %r at depth %g"
                                    % (source, row.radiance, row.depth))
            samples = grouped.setdefault(row.key, ([], []))
            if samples[0] and row.depth <= samples[0][-1]:
                raise TableGapError("%s: depths of series %s are not strictly increasing at %g"
                                    % (source, _key_label(row.key), row.depth))
            samples[0].append(row.depth)
            samples[1].append(row.radiance)
        if not grouped:
            raise TableGapError("%s: radiance table is empty" % source)
        self._series = {key: _Series(d, v) for key, (d, v) in grouped.items()}

    @classmethod
    def load_csv(cls, path):
        """
        Read a table from a CSV file with the columns of RADIANCE_COLUMNS.
        """
        rows = []
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                reader = csv.DictReader(handle)
                header = tuple(reader.fieldnames or ())
                if sorted(header) != sorted(RADIANCE_COLUMNS):
                    raise TableGapError("%s: radiance header must be %s, got %s"
                                        % (path, ",".join(RADIANCE_COLUMNS), ",".join(header)))
                for record in reader:
                    try:
                        rows.append(RadianceRow(float(record["depth_m"]),
                                                PropagationMode.parse(record["mode"]),
                                                LunarPhase.parse(record["lunar_phase"]),
                                                WaterType.parse(record["water_type"]),
                                                float(record["radiance_w_m2_sr_nm"])))
                    except (TypeError, ValueError) as err:
                        raise TableGapError("%s:%d: bad radiance row: %s"
                                            % (path, reader.line_num, err)) from None
        except OSError as err:
            raise TableGapError("cannot read radiance table %s: %s" % (path, err)) from None
        logger.debug("loaded %d radiance rows from %s", len(rows), path)
        return cls(rows, source=str(path))

    @classmethod
    def synthesize(cls, kd_ratio=DEFAULT_KD_RATIO, max_depth=1000.0, step=10.0):
        """
        Build the exponential-decay table for every mode, phase and water.

        :Args:

            kd_ratio: float, optional
                Diffuse attenuation of the background relative to the beam
                attenuation of each water type. Defaults to 0.5.
            max_depth: float, optional
                Deepest tabulated depth, m. Defaults to 1000.
            step: float, optional
                Depth spacing, m. Defaults to 10.

        """
        if not kd_ratio > 0.0:
            raise ParameterValidationError("kd_ratio must be positive", field="kd_ratio")
        if not (step > 0.0 and max_depth > 0.0):
            raise ParameterValidationError("max_depth and step must be positive", field="step")
        depths = np.arange(0.0, max_depth + 0.5 * step, step)
        rows = []
        for water in WaterType:
            kd = kd_ratio * water.nominal_chi
            for mode in PropagationMode:
                for phase in LunarPhase:
                    surface = SURFACE_RADIANCE[mode] * PHASE_SCALE[phase] * WATER_SCALE[water]
                    rows.extend(RadianceRow(float(d), mode, phase, water, surface * math.exp(-kd * d))
                                for d in depths)
        return cls(rows, source="synthetic(kd_ratio=%g)" % kd_ratio)

    @classmethod
    def bundled(cls):
        """
        Return the default table: `$UWQKD_DATA_DIR/radiance.csv` when the
        variable is set, the packaged table otherwise.
        """
        directory = os.environ.get(DATA_DIR_ENV) or BUNDLED_DATA_DIR
        return _load_cached(os.path.join(directory, RADIANCE_FILENAME))

    def lookup(self, scenario, depth):
        """
        Radiance seen by the receiver of `scenario` at `depth` metres.

        Depths outside the tabulated range return the nearest endpoint with
        the `clamped` flag set.

        """
        try:
            series = self._series[scenario.key]
        except KeyError:
            raise TableGapError("scenario not covered by table %s: %s"
                                % (self._source, _key_label(scenario.key))) from None
        result = series.lookup(depth)
        if result.clamped:
            logger.debug("radiance depth %g m outside %s, clamped", depth, _key_label(scenario.key))
        return result

    def covers(self, scenario):
        return scenario.key in self._series

    def keys(self):
        """Return the (mode, phase, water) keys in insertion order."""
        return list(self._series)

    def series(self, key):
        """Return copies of the (depths, radiances) arrays of one series."""
        series = self._series[key]
        return series.depths.copy(), series.values.copy()

    def to_rows(self):
        rows = []
        for key, series in self._series.items():
            rows.extend(RadianceRow(float(d), key[0], key[1], key[2], float(v))
                        for d, v in zip(series.depths, series.values))
        return rows

    @property
    def source(self):
        """str. Origin of the table."""
        return self._source


@lru_cache(maxsize=8)
def _load_cached(path):
    return RadianceTable.load_csv(path)


def _key_label(key):
    mode, phase, water = key
    return "mode=%s phase=%s water=%s" % (mode.value, phase.value, water.value)


def radiance(table, scenario, depth):
    """Log-linear radiance lookup, see `RadianceTable.lookup`."""
    return table.lookup(scenario, depth)


if __name__ == "__main__":
    from .channel import ChannelScenario
    table = RadianceTable.bundled()
    for mode in PropagationMode:
        scenario = ChannelScenario(mode=mode)
        values = ", ".join("%.3g" % table.lookup(scenario, d).value for d in (0, 100, 500, 1000))
        print("%-10s L(0, 100, 500, 1000 m) = %s" % (mode.name, values))
