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
Link configuration files, presets and optical train files.

A configuration file has four sections, each optional::

    preset = optimal          # before the first section, or in [system]

    [system]
    P = 2.3e-4
    f_MHz = 40
    dt_gate_ps = 200

    [geometry]
    gamma_mrad = 10
    A_cm2 = 30

    [channel]
    water_type = I
    mode = D
    lunar_phase = full

    [protocol]
    mu = 0.48
    nu = 0.05

Quantities with a unit carry it in the key name and are converted to SI
when the file is loaded. Unknown keys are rejected.

"""
from __future__ import annotations

import configparser
import logging
import math
import os
from dataclasses import dataclass, replace
from typing import Optional

from .channel import ChannelScenario, ReceiverGeometry, WaterType
from .errors import ConfigError, ParameterValidationError
from .keyrate import ProtocolParams
from .qber import LinkBudget, SystemParams
from .radiance import RadianceTable
from .stokes import BeamSplitterSpec, OpticalElement, OpticalTrain, PolarizerSpec, WavePlateSpec
from .sweep import LinkSetup

logger = logging.getLogger(__name__)

ROOT_SECTION = "__root__"

ORDINARY_SYSTEM = SystemParams()
OPTIMAL_SYSTEM = ORDINARY_SYSTEM.replace(P=2.3e-4, dlambda=0.12, eta=0.8, dt_gate=200e-12, I_dc=1.0)
PRESETS = {"ordinary": ORDINARY_SYSTEM, "optimal": OPTIMAL_SYSTEM}

# key -> (record field, scale to SI)
SYSTEM_KEYS = {
    "P": ("P", 1.0), "mu": ("mu", 1.0), "eta": ("eta", 1.0), "eta_opt": ("eta_opt", 1.0),
    "f_Hz": ("f", 1.0), "f_MHz": ("f", 1e6),
    "dt_gate_s": ("dt_gate", 1.0), "dt_gate_ns": ("dt_gate", 1e-9), "dt_gate_ps": ("dt_gate", 1e-12),
    "I_dc": ("I_dc", 1.0),
    "lambda_m": ("wavelength", 1.0), "lambda_nm": ("wavelength", 1e-9),
    "dlambda_nm": ("dlambda", 1.0),
    "N_scatter": ("N_scatter", 1.0), "P_s": ("P_s", 1.0),
}
GEOMETRY_KEYS = {
    "gamma_rad": ("gamma", 1.0), "gamma_mrad": ("gamma", 1e-3), "gamma_deg": ("gamma", math.pi / 180),
    "A_m2": ("A", 1.0), "A_cm2": ("A", 1e-4),
}
CHANNEL_KEYS = {
    "chi_c": ("chi_c", 1.0), "tx_depth_m": ("tx_depth", 1.0), "rx_fixed_depth_m": ("rx_fixed_depth", 1.0),
    "kd_ratio": ("kd_ratio", 1.0),
}
CHANNEL_TEXT_KEYS = ("water_type", "mode", "lunar_phase", "radiance")
PROTOCOL_KEYS = {"q": ("q", 1.0), "f_ec": ("f_ec", 1.0), "mu": ("mu", 1.0), "nu": ("nu", 1.0)}
PROTOCOL_TEXT_KEYS = ("omega_convention", "decoy_estimator")
# Stems of the quantities that need a unit suffix, per section.
UNIT_STEMS = {"system": ("f", "dt_gate", "lambda", "dlambda"), "geometry": ("gamma", "A"),
              "channel": ("tx_depth", "rx_fixed_depth")}
SECTIONS = ("system", "geometry", "channel", "protocol")
ENUM_FIELDS = {"WaterType": "water_type", "PropagationMode": "mode", "LunarPhase": "lunar_phase"}


@dataclass(frozen=True)
class ConfigDocument:
    """
    Parameters loaded from a configuration file or a preset.

    `radiance` is the path of a radiance table and `kd_ratio` the decay
    ratio of a synthesized one; both None select the bundled table.

    """
    system: SystemParams
    scenario: ChannelScenario
    protocol: ProtocolParams
    geometry: ReceiverGeometry
    preset: Optional[str] = None
    radiance: Optional[str] = None
    kd_ratio: Optional[float] = None
    source: Optional[str] = None

    def table(self):
        """Radiance table selected by the document."""
        if self.radiance is not None:
            return RadianceTable.load_csv(self.radiance)
        if self.kd_ratio is not None:
            return RadianceTable.synthesize(self.kd_ratio)
        return RadianceTable.bundled()

    def link(self, table=None):
        if table is None:
            table = self.table()
        return LinkBudget(self.system, self.scenario, self.geometry, table)

    def setup(self):
        return LinkSetup(self.system, self.scenario, self.geometry, self.protocol)

    def replace_scenario(self, **changes):
        """
        Return a document with scenario fields replaced; a new `chi_c` is
        applied to the system as well.
        """
        scenario = replace(self.scenario, **changes)
        system = self.system.replace(chi_c=scenario.chi_c)
        return replace(self, scenario=scenario, system=system)


def from_preset(name="ordinary", **scenario):
    """
    Document of a bundled preset, "ordinary" or "optimal", with default
    channel and protocol.
    """
    try:
        system = PRESETS[name]
    except KeyError:
        raise ConfigError("unknown preset %r (expected one of %s)" % (name, ", ".join(PRESETS))) from None
    chan = ChannelScenario(**scenario)
    system = system.replace(chi_c=chan.chi_c)
    return ConfigDocument(system, chan, ProtocolParams(), system.geometry(), preset=name)


class _LineIndex:
    """Line numbers of the keys of an INI text, by section."""

    def __init__(self, lines):
        self._where = {}
        section = ROOT_SECTION
        for lineno, line in enumerate(lines, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if text.startswith("[") and text.endswith("]"):
                section = text[1:-1].strip()
                self._where.setdefault((section, None), lineno)
                continue
            key = text.split("=", 1)[0].strip()
            self._where.setdefault((section, key), lineno)

    def __call__(self, section, key=None):
        return self._where.get((section, key))


def _read_ini(path, text):
    parser = configparser.ConfigParser(interpolation=None, strict=True, delimiters=("=",),
                                       comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                       empty_lines_in_values=False, default_section="__defaults__")
    parser.optionxform = str
    try:
        parser.read_string("[%s]\n%s" % (ROOT_SECTION, text), source=str(path))
    except configparser.ParsingError as err:
        lineno, line = err.errors[0]
        raise ConfigError("cannot parse line %s" % line, path, lineno - 1) from None
    except configparser.DuplicateOptionError as err:
        raise ConfigError("duplicate key %r in [%s]" % (err.option, err.section), path,
                          err.lineno - 1 if err.lineno else None) from None
    except configparser.DuplicateSectionError as err:
        raise ConfigError("duplicate section [%s]" % err.section, path,
                          err.lineno - 1 if err.lineno else None) from None
    except configparser.Error as err:
        raise ConfigError(str(err), path) from None
    return parser


def _number(path, where, section, key, value):
    try:
        number = float(value)
    except ValueError:
        raise ConfigError("%s: %r is not a number" % (key, value), path, where(section, key)) from None
    if not math.isfinite(number):
        raise ConfigError("%s: %r is not finite" % (key, value), path, where(section, key))
    return number


def _collect(path, where, section, items, numeric, text_keys=()):
    values, fields = {}, {}
    for key, value in items:
        if key in numeric:
            name, scale = numeric[key]
            number = _number(path, where, section, key, value) * scale
        elif key in text_keys:
            name, number = key, value.strip()
        else:
            stems = [s for s in UNIT_STEMS.get(section, ()) if key == s or key.startswith(s + "_")]
            if stems:
                accepted = sorted(k for k in numeric if k.startswith(stems[0] + "_"))
                raise ConfigError("unit suffix of %r not recognised (use one of %s)" % (key, ", ".join(accepted)),
                                  path, where(section, key))
            raise ConfigError("unknown key %r in [%s]" % (key, section), path, where(section, key))
        if name in values:
            raise ConfigError("%s given twice in [%s] (as %s and %s)" % (name, section, fields[name], key),
                              path, where(section, key))
        values[name] = number
        fields[name] = key
    return values, fields


def _build(path, where, make, values, fields, section):
    try:
        return make(**values)
    except ParameterValidationError as err:
        field = ENUM_FIELDS.get(err.field, err.field)
        key = fields.get(field, field)
        raise ConfigError("invalid %s: %s" % (key, err), path, where(section, key)) from None


def load_config(path, preset=None):
    """
    Load a configuration file into a ConfigDocument.

    :Args:

        path: str
            Configuration file.
        preset: str, optional
            Preset used when the file does not name one. Defaults to
            "ordinary".

    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise ConfigError("cannot read configuration: %s" % err.strerror, path) from None
    where = _LineIndex(text.splitlines())
    parser = _read_ini(path, text)
    for section in parser.sections():
        if section != ROOT_SECTION and section not in SECTIONS:
            raise ConfigError("unknown section [%s]" % section, path, where(section))

    root = dict(parser.items(ROOT_SECTION))
    system_items = dict(parser.items("system")) if parser.has_section("system") else {}
    for key in root:
        if key != "preset":
            raise ConfigError("only 'preset' may appear before the first section, got %r" % key,
                              path, where(ROOT_SECTION, key))
    if "preset" in root and "preset" in system_items:
        raise ConfigError("preset given twice", path, where("system", "preset"))
    name = (root.get("preset") or system_items.pop("preset", None) or preset or "ordinary").strip()
    if name not in PRESETS:
        line = where(ROOT_SECTION, "preset") or where("system", "preset")
        raise ConfigError("unknown preset %r (expected one of %s)" % (name, ", ".join(PRESETS)), path, line)

    def section_items(section):
        return list(parser.items(section)) if parser.has_section(section) else []

    sys_values, sys_fields = _collect(path, where, "system", system_items.items(), SYSTEM_KEYS)
    geo_values, geo_fields = _collect(path, where, "geometry", section_items("geometry"), GEOMETRY_KEYS)
    chan_values, chan_fields = _collect(path, where, "channel", section_items("channel"), CHANNEL_KEYS,
                                        CHANNEL_TEXT_KEYS)
    proto_values, proto_fields = _collect(path, where, "protocol", section_items("protocol"),
                                          PROTOCOL_KEYS, PROTOCOL_TEXT_KEYS)

    radiance = chan_values.pop("radiance", None)
    if radiance is not None and not os.path.isabs(radiance):
        radiance = os.path.join(os.path.dirname(os.path.abspath(path)), radiance)
    kd_ratio = chan_values.pop("kd_ratio", None)
    if radiance is not None and kd_ratio is not None:
        raise ConfigError("give either radiance or kd_ratio, not both", path, where("channel", "kd_ratio"))
    if kd_ratio is not None and not kd_ratio > 0.0:
        raise ConfigError("kd_ratio must be positive", path, where("channel", "kd_ratio"))
    if "chi_c" not in chan_values:
        try:
            chan_values["chi_c"] = WaterType.parse(chan_values.get("water_type", "I")).nominal_chi
        except ParameterValidationError as err:
            raise ConfigError(str(err), path, where("channel", "water_type")) from None
    scenario = _build(path, where, ChannelScenario, chan_values, chan_fields, "channel")

    overrides = dict(sys_values, chi_c=scenario.chi_c, **geo_values)
    fields = dict(sys_fields, **geo_fields)
    section_of = {name: ("geometry" if name in geo_fields else "system") for name in fields}

    try:
        system = PRESETS[name].replace(**overrides)
    except ParameterValidationError as err:
        section = section_of.get(err.field, "system")
        key = fields.get(err.field, err.field)
        raise ConfigError("invalid %s: %s" % (key, err), path, where(section, key)) from None
    protocol = _build(path, where, ProtocolParams, proto_values, proto_fields, "protocol")
    geometry = system.geometry()
    logger.debug("loaded configuration %s (preset %s)", path, name)
    return ConfigDocument(system, scenario, protocol, geometry, preset=name, radiance=radiance,
                          kd_ratio=kd_ratio, source=str(path))


def dump_config(doc, path=None):
    """
    Write `doc` with SI keys and exact float representations, so that
    loading the result gives the same parameters. Returns the text.
    """
    system, scenario, protocol, geometry = doc.system, doc.scenario, doc.protocol, doc.geometry
    lines = ["[system]"]
    lines += ["%s = %r" % (key, float(getattr(system, field)))
              for key, field in (("P", "P"), ("mu", "mu"), ("eta", "eta"), ("eta_opt", "eta_opt"),
                                 ("f_Hz", "f"), ("dt_gate_s", "dt_gate"), ("I_dc", "I_dc"),
                                 ("lambda_m", "wavelength"), ("dlambda_nm", "dlambda"),
                                 ("N_scatter", "N_scatter"), ("P_s", "P_s"))]
    lines += ["", "[geometry]", "gamma_rad = %r" % float(geometry.gamma), "A_m2 = %r" % float(geometry.aperture)]
    lines += ["", "[channel]", "water_type = %s" % scenario.water_type.value,
              "chi_c = %r" % float(scenario.chi_c), "mode = %s" % scenario.mode.value,
              "lunar_phase = %s" % scenario.lunar_phase.value, "tx_depth_m = %r" % float(scenario.tx_depth)]
    if scenario.rx_fixed_depth is not None:
        lines.append("rx_fixed_depth_m = %r" % float(scenario.rx_fixed_depth))
    if doc.radiance is not None:
        lines.append("radiance = %s" % doc.radiance)
    if doc.kd_ratio is not None:
        lines.append("kd_ratio = %r" % float(doc.kd_ratio))
    lines += ["", "[protocol]", "q = %r" % float(protocol.q), "f_ec = %r" % float(protocol.f_ec)]
    if protocol.mu is not None:
        lines.append("mu = %r" % float(protocol.mu))
    lines += ["nu = %r" % float(protocol.nu), "omega_convention = %s" % protocol.omega_convention,
              "decoy_estimator = %s" % protocol.decoy_estimator]
    text = "\n".join(lines) + "\n"
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as err:
            raise ConfigError("cannot write configuration: %s" % err.strerror, path) from None
    return text


# Train file fields: key -> (spec field, scale to radians or 1).
TRAIN_FIELDS = {
    "polarizer": {"epsilon": ("epsilon", 1.0), "theta": ("theta", 1.0), "theta_deg": ("theta", math.pi / 180)},
    "waveplate": {"delta": ("delta", 1.0), "delta_deg": ("delta", math.pi / 180),
                  "theta": ("theta", 1.0), "theta_deg": ("theta", math.pi / 180)},
}
TRAIN_FIELDS["bs_t"] = TRAIN_FIELDS["bs_r"] = {
    "tp": ("tp", 1.0), "ts": ("ts", 1.0), "rp": ("rp", 1.0), "rs": ("rs", 1.0),
    "phi_t": ("phi_t", 1.0), "phi_t_deg": ("phi_t", math.pi / 180),
    "phi_r": ("phi_r", 1.0), "phi_r_deg": ("phi_r", math.pi / 180),
}
TRAIN_SPECS = {"polarizer": PolarizerSpec, "waveplate": WavePlateSpec, "bs_t": BeamSplitterSpec,
               "bs_r": BeamSplitterSpec}


def load_train(path):
    """
    Load an optical train file.

    An optional `path_label = HV|DM` line comes before the first section,
    then one section per element in optical order, each with a `kind`
    and the fields of its specification::

        path_label = DM

        [source]
        kind = polarizer
        epsilon = 0.01
        theta_deg = 45

        [hwp1]
        kind = waveplate
        theta_deg = 45

    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise ConfigError("cannot read train: %s" % err.strerror, path) from None
    where = _LineIndex(text.splitlines())
    parser = _read_ini(path, text)
    root = dict(parser.items(ROOT_SECTION))
    for key in root:
        if key != "path_label":
            raise ConfigError("only 'path_label' may appear before the first section, got %r" % key,
                              path, where(ROOT_SECTION, key))
    elements = []
    for section in parser.sections():
        if section == ROOT_SECTION:
            continue
        items = dict(parser.items(section))
        kind = items.pop("kind", "").strip()
        if kind not in TRAIN_SPECS:
            raise ConfigError("element [%s] needs kind = polarizer, waveplate, bs_t or bs_r" % section,
                              path, where(section, "kind") or where(section))
        values, fields = _collect(path, where, section, items.items(), TRAIN_FIELDS[kind])
        spec = _build(path, where, TRAIN_SPECS[kind], values, fields, section)
        elements.append(OpticalElement(kind, spec))
    if not elements:
        raise ConfigError("optical train has no elements", path)
    try:
        return OpticalTrain(elements, root.get("path_label", "HV").strip())
    except ParameterValidationError as err:
        raise ConfigError(str(err), path, where(ROOT_SECTION, "path_label")) from None


def resolve_table(doc, radiance=None):
    """
    Radiance table of a run: `radiance` (a CSV path given on the command
    line) wins over the document's own choice.
    """
    if radiance is not None:
        return RadianceTable.load_csv(radiance)
    return doc.table()
