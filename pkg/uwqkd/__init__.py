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
Description
===========

The `uwqkd` package is a link-budget engine for polarization-encoded BB84
quantum key distribution through sea water. It models the optics of the
transmitter and receiver with Mueller calculus, the water channel with
Beer-Lambert attenuation and a depth dependent background radiance, and
derives from them the quantum bit error rate, the sifted key rate and the
secure key rate with and without decoy states.

The package needs numpy, scipy and matplotlib (the latter only to render
figures).

Usage
=====

Typical program will look like this:

>>> import uwqkd
>>> doc = uwqkd.from_preset("ordinary", mode="D")
>>> link = doc.link()
>>> link.qber(100.0).total < 0.11
True
>>> report = uwqkd.key_rate_report(link, doc.protocol, 100.0)

The same computations are available from the command line::

    uwqkd qber --preset ordinary --mode D --distance 100
    uwqkd max-distance --preset optimal --mode H
    uwqkd reproduce qber_ordinary --outdir out --png

Classes
=======

Available classes within the uwqkd package are:

* StokesVector, MuellerMatrix: polarization state and optical transfer.

    StokesVector(s0, s1, s2, s3)

* OpticalElement, OpticalTrain: polarizers, wave plates and beam splitters
  chained along the path of one basis.

    OpticalTrain(elements, path_label="HV")

* ToleranceBox: manufacturing tolerances explored by `worst_case_contrast`.

    ToleranceBox(epsilon=0.01, mount_error=5', retardance_error=2pi/300, ...)

* ChannelScenario, ReceiverGeometry: water body, link direction and
  receiver optics.

    ChannelScenario(water_type="I", chi_c=0.03, mode="D", lunar_phase="full")

* RadianceTable: background radiance against depth, bundled or read from CSV.

    RadianceTable.bundled(), RadianceTable.load_csv(path)

* SystemParams, LinkBudget: link hardware and the QBER of a link.

    LinkBudget(system, scenario, geometry=None, table=None)

* ProtocolParams, KeyRateReport: sifting, error correction and decoy
  settings, and the key rates they give.

    ProtocolParams(q=1, f_ec=1, mu=None, nu=0.05)

* SweepSpec, LinkSetup, MaxDistanceQuery: parameter sweeps and range search.

    SweepSpec(variable, start, stop, steps, outputs=("qber_breakdown",))

To see the complete documentation of a specific class (LinkBudget in this
example), type in a python interpreter::

    import uwqkd
    help(uwqkd.LinkBudget)

"""
from .errors import (UwqkdError, ParameterValidationError, ConfigError, InfeasibleQueryError,
                     TableGapError, ExtinguishedError, NoCountsError, NoSingleYieldError, OutputError)
from .stokes import (StokesVector, MuellerMatrix, PolarizerSpec, WavePlateSpec, BeamSplitterSpec,
                     OpticalElement, OpticalTrain, nominal_state, apply, contrast)
from .tolerance import ToleranceBox, ContrastReport, worst_case_contrast, ORDINARY_OPTICS, OPTIMAL_OPTICS
from .channel import (WaterType, PropagationMode, LunarPhase, ChannelScenario, ReceiverGeometry,
                      link_transmittance, solid_angle, receiver_depth, background_rate)
from .radiance import RadianceTable, radiance
from .qber import SystemParams, LinkBudget, rates, qber_modified, qber_legacy
from .keyrate import (ProtocolParams, KeyRateReport, binary_entropy, sifted_rate, key_rate_report,
                      secure_rate_decoy, secure_rate_no_decoy, one_decoy_estimate)
from .sweep import SweepSpec, LinkSetup, MaxDistanceQuery, sweep, max_secure_distance
from .csvio import emit_csv
from .config import from_preset, load_config, dump_config, load_train

UWQKD_VERSION = "0.1.0"

def version():
    return UWQKD_VERSION
