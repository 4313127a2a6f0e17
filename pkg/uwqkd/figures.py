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
Canonical sweeps behind the standard figures of the link study.

============== ===================================================================
radiance       background radiance against depth, Jerlov I and II, three moons
optics         QBER against field of view and aperture at 100 m
components     QBER components against distance, ordinary and optimal systems
qber_ordinary  total QBER against distance, ordinary system, modified and legacy
qber_optimal   total QBER against distance, optimal system
sifted         sifted key rate against distance
secure         secure key rate against distance, with and without decoy states
onedecoy       one-decoy key rate, mu = 0.48, nu = 0.05, ordinary system
============== ===================================================================

The numbered names fig3 to fig8 select optics, components, qber_ordinary,
qber_optimal, sifted and secure in that order.

Every panel curve is written to `<figure>_<panel>_<curve>.csv`, with a
`plot_<figure>.py` script next to them.

"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .channel import ChannelScenario, LunarPhase, PropagationMode, WaterType
from .config import from_preset
from .csvio import emit_csv
from .errors import ParameterValidationError
from .keyrate import ProtocolParams
from .plotting import render, write_plot_script
from .radiance import RADIANCE_COLUMNS, RadianceTable
from .sweep import LinkSetup, SweepSpec, sweep

logger = logging.getLogger(__name__)

MODES = ("D", "U", "H")


@dataclass(frozen=True)
class Curve:
    """
    One curve of a panel: a sweep of one preset, mode and water type, or
    a radiance series when `spec` is None.
    """
    name: str
    mode: str
    water: str = "I"
    preset: str = "ordinary"
    spec: Optional[SweepSpec] = None
    protocol: ProtocolParams = field(default_factory=ProtocolParams)
    lunar_phase: str = "full"

    def setup(self):
        water = WaterType.parse(self.water)
        doc = from_preset(self.preset, water_type=water, chi_c=water.nominal_chi, mode=self.mode,
                          lunar_phase=self.lunar_phase)
        return LinkSetup(doc.system, doc.scenario, doc.geometry, self.protocol)


@dataclass(frozen=True)
class Panel:
    label: str
    title: str
    x: str
    columns: Tuple[str, ...]
    curves: Tuple[Curve, ...]
    xlabel: str
    ylabel: str
    logy: bool = False


@dataclass(frozen=True)
class Figure:
    name: str
    title: str
    panels: Tuple[Panel, ...]


def _distance(stop, steps, outputs=("qber_breakdown",), **kwargs):
    return SweepSpec("distance", 0.0, stop, steps, outputs, **kwargs)


def _modes(spec, preset="ordinary", water="I", protocol=None, suffix=""):
    protocol = protocol or ProtocolParams()
    return tuple(Curve(mode + suffix, mode, water, preset, spec, protocol) for mode in MODES)


def _radiance():
    panels = []
    for label, (water, phase) in zip("abcdef", [(w, p) for w in ("I", "II") for p in LunarPhase]):
        curves = tuple(Curve(mode, mode, water, lunar_phase=phase.value) for mode in MODES)
        panels.append(Panel(label, "Jerlov %s, %s" % (water, phase.value), "depth_m",
                            ("radiance_w_m2_sr_nm",), curves, "depth (m)", "L (W/m2/sr/nm)", True))
    return Figure("radiance", "Background spectral radiance at 480 nm", tuple(panels))


def _optics():
    fov = SweepSpec("fov", 0.0, 50.0, 101, distance=100.0)
    aperture = SweepSpec("aperture", 1.0, 100.0, 100, distance=100.0)
    return Figure("optics", "QBER against receiver optics, Jerlov I, full moon, 100 m", (
        Panel("a", "field of view (A = 30 cm2)", "gamma_mrad", ("q_total",), _modes(fov),
              "FOV (mrad)", "QBER"),
        Panel("b", "aperture (FOV = 10 mrad)", "A_cm2", ("q_total",), _modes(aperture),
              "aperture (cm2)", "QBER")))


def _components():
    panels = []
    components = ("q_opt", "q_dc", "q_bac", "q_total")
    for labels, preset, stop in (("abc", "ordinary", 400.0), ("def", "optimal", 500.0)):
        spec = _distance(stop, 101)
        for label, mode in zip(labels, MODES):
            panels.append(Panel(label, "%s, %s" % (preset, PropagationMode.parse(mode).name.lower()), "r_m",
                                components, (Curve(mode, mode, "I", preset, spec),),
                                "distance (m)", "QBER", True))
    return Figure("components", "QBER components, Jerlov I, full moon", tuple(panels))


def _total_qber(name, preset, stops, legacy):
    panels = []
    for label, water, stop in zip("ab", ("I", "II"), stops):
        spec = _distance(stop, 101)
        curves = _modes(spec, preset, water)
        if legacy:
            curves += _modes(_distance(stop, 101, legacy=True), preset, water, suffix="-legacy")
        panels.append(Panel(label, "chi_c = %g /m" % WaterType.parse(water).nominal_chi, "r_m",
                            ("q_total",), curves, "distance (m)", "QBER"))
    return Figure(name, "Total QBER, %s system, full moon" % preset, tuple(panels))


def _sifted():
    panels = []
    for label, preset, stop in (("a", "ordinary", 400.0), ("b", "optimal", 500.0)):
        spec = _distance(stop, 101, ("sifted",))
        panels.append(Panel(label, preset, "r_m", ("sifted_bps",), _modes(spec, preset),
                            "distance (m)", "sifted key rate (bit/s)", True))
    return Figure("sifted", "Sifted key rate, Jerlov I, full moon", tuple(panels))


def _secure():
    panels = []
    for label, preset, stop in (("a", "ordinary", 300.0), ("b", "optimal", 500.0)):
        decoy = _distance(stop, 101, ("secure",), method="decoy")
        no_decoy = _distance(stop, 101, ("secure",), method="nodecoy")
        curves = _modes(decoy, preset, suffix="-decoy") + _modes(no_decoy, preset, suffix="-nodecoy")
        panels.append(Panel(label, preset, "r_m", ("secure_bps",), curves,
                            "distance (m)", "secure key rate (bit/s)", True))
    return Figure("secure", "Secure key rate, Jerlov I, full moon", tuple(panels))


def _one_decoy():
    protocol = ProtocolParams(mu=0.48, nu=0.05)
    panels = []
    for label, water, stop in (("a", "I", 300.0), ("b", "II", 100.0)):
        spec = _distance(stop, 101, ("secure",), method="onedecoy")
        panels.append(Panel(label, "chi_c = %g /m" % WaterType.parse(water).nominal_chi, "r_m",
                            ("secure_bps",), _modes(spec, "ordinary", water, protocol),
                            "distance (m)", "secure key rate (bit/s)", True))
    return Figure("onedecoy", "One-decoy key rate, ordinary system, mu = 0.48, nu = 0.05", tuple(panels))


FIGURES = {
    "radiance": _radiance,
    "optics": _optics,
    "components": _components,
    "qber_ordinary": lambda: _total_qber("qber_ordinary", "ordinary", (300.0, 100.0), True),
    "qber_optimal": lambda: _total_qber("qber_optimal", "optimal", (500.0, 150.0), False),
    "sifted": _sifted,
    "secure": _secure,
    "onedecoy": _one_decoy,
}

# Numbered names of the standard link study figures.
FIGURE_ALIASES = {"fig3": "optics", "fig4": "components", "fig5": "qber_ordinary", "fig6": "qber_optimal",
                  "fig7": "sifted", "fig8": "secure"}


def get_figure(name):
    """
    Return the recipe of figure `name`, a key of FIGURES or of
    FIGURE_ALIASES.
    """
    try:
        return FIGURES[FIGURE_ALIASES.get(name, name)]()
    except KeyError:
        raise ParameterValidationError("unknown figure %r (expected one of %s)"
                                       % (name, ", ".join(list(FIGURES) + list(FIGURE_ALIASES))),
                                       field="figure") from None


def _radiance_rows(table, curve):
    scenario = ChannelScenario(water_type=curve.water, chi_c=WaterType.parse(curve.water).nominal_chi,
                               mode=curve.mode, lunar_phase=curve.lunar_phase)
    depths, values = table.series(scenario.key)
    return [dict(zip(RADIANCE_COLUMNS[::4], (float(d), float(v)))) for d, v in zip(depths, values)]


def reproduce(name, outdir, table=None, workers=1, png=False):
    """
    Run the sweeps of figure `name` and write its CSV files and plot
    script into `outdir`. With `png`, also render the figure. Returns the
    written paths.
    """
    figure = get_figure(name)
    if table is None:
        table = RadianceTable.bundled()
    os.makedirs(outdir, exist_ok=True)
    written, panels = [], []
    for panel in figure.panels:
        series = []
        for curve in panel.curves:
            filename = "%s_%s_%s.csv" % (figure.name, panel.label, curve.name)
            path = os.path.join(outdir, filename)
            if curve.spec is None:
                emit_csv(_radiance_rows(table, curve), path, columns=RADIANCE_COLUMNS[::4])
            else:
                result = sweep(curve.spec, curve.setup(), table, workers)
                emit_csv(result.rows, path, columns=result.columns)
            written.append(path)
            series.extend((filename, panel.x, column, curve.name if len(panel.columns) == 1 else column)
                          for column in panel.columns)
        panels.append({"title": "(%s) %s" % (panel.label, panel.title), "xlabel": panel.xlabel,
                       "ylabel": panel.ylabel, "logy": panel.logy, "series": series})
    png_name = "%s.png" % figure.name
    written.append(write_plot_script(figure.title, panels, os.path.join(outdir, "plot_%s.py" % figure.name),
                                     png_name))
    if png:
        written.append(render(figure.title, panels, outdir, os.path.join(outdir, png_name)))
    logger.info("%s: wrote %d files to %s", figure.name, len(written), outdir)
    return written
