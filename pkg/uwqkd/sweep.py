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
Parameter sweeps and maximum secure distance search.

A sweep evaluates a link over a linear grid of one variable (distance,
field of view or aperture) and returns rows in grid order. The grid is
expressed in the display unit of the variable: metres, milliradians or
square centimetres.

"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .channel import ReceiverGeometry
from .errors import InfeasibleQueryError, ParameterValidationError, UwqkdError
from .keyrate import KEY_RATE_METHODS, ProtocolParams, key_rate_report, sifted_rate
from .qber import LinkBudget
from .radiance import RadianceTable

logger = logging.getLogger(__name__)

# Column heading and scale to SI of each sweep variable.
SWEEP_VARIABLES = {"distance": ("r_m", 1.0), "fov": ("gamma_mrad", 1e-3), "aperture": ("A_cm2", 1e-4)}
SWEEP_OUTPUTS = ("qber_breakdown", "sifted", "secure")
QBER_COLUMNS = ("q_opt", "q_dc", "q_bac", "q_scatter", "q_total")
KEYRATE_COLUMNS = ("sifted_bps", "secure_bps", "Y1", "Q1", "e1", "omega_untagged", "insecure_flag")
MAX_DISTANCE_CRITERIA = ("qber", "rate")
SCAN_POINTS = 64


@dataclass(frozen=True)
class LinkSetup:
    """
    Fixed parameters of a sweep or distance search.

    :Args:

        system: SystemParams
            Link hardware.
        scenario: ChannelScenario
            Water, propagation mode and moon phase.
        geometry: ReceiverGeometry, optional
            Receiver optics. Defaults to the aperture and field of view of
            `system`.
        protocol: ProtocolParams, optional
            Key rate settings. Defaults to ProtocolParams().

    """
    system: object
    scenario: object
    geometry: Optional[ReceiverGeometry] = None
    protocol: ProtocolParams = field(default_factory=ProtocolParams)

    @property
    def receiver(self):
        """ReceiverGeometry. Effective receiver optics."""
        return self.geometry if self.geometry is not None else self.system.geometry()

    def link(self, table=None):
        return LinkBudget(self.system, self.scenario, self.receiver, table)

    def point(self, variable, value, distance):
        """
        Return (system, geometry, r) with `variable` set to `value`, given
        in its display unit; `distance` is the range of fov and aperture
        sweeps.
        """
        scale = SWEEP_VARIABLES[variable][1]
        geometry = self.receiver
        if variable == "distance":
            return self.system, geometry, value * scale
        if variable == "fov":
            gamma = value * scale
            return (self.system.replace(gamma=gamma), ReceiverGeometry(geometry.aperture, gamma),
                    distance)
        area = value * scale
        return self.system.replace(A=area), ReceiverGeometry(area, geometry.gamma), distance


@dataclass(frozen=True)
class SweepSpec:
    """
    Linear grid of one variable and the quantities to evaluate on it.

    :Args:

        variable: str
            "distance" (m), "fov" (mrad) or "aperture" (cm2).
        start: float
            First grid value.
        stop: float
            Last grid value, above `start`.
        steps: int
            Number of grid points, at least 2.
        outputs: tuple of str, optional
            Any of "qber_breakdown", "sifted", "secure". Defaults to
            ("qber_breakdown",).
        distance: float, optional
            Range of fov and aperture sweeps, m. Defaults to 100.
        legacy: bool, optional
            Use the legacy QBER formula. Defaults to False.
        method: str, optional
            Key rate method of the "secure" output. Defaults to "decoy".

    """
    variable: str
    start: float
    stop: float
    steps: int
    outputs: Tuple[str, ...] = ("qber_breakdown",)
    distance: float = 100.0
    legacy: bool = False
    method: str = "decoy"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ParameterValidationError("sweep variable must be one of %s, got %r"
                                           % (", ".join(SWEEP_VARIABLES), self.variable), field="variable")
        outputs = (self.outputs,) if isinstance(self.outputs, str) else tuple(self.outputs)
        object.__setattr__(self, "outputs", outputs)
        unknown = [name for name in self.outputs if name not in SWEEP_OUTPUTS]
        if unknown or not self.outputs:
            raise ParameterValidationError("sweep outputs must be among %s, got %r"
                                           % (", ".join(SWEEP_OUTPUTS), self.outputs), field="outputs")
        if not self.start < self.stop:
            raise ParameterValidationError("sweep needs from < to, got %r >= %r" % (self.start, self.stop),
                                           field="start")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ParameterValidationError("sweep needs at least 2 steps, got %r" % (self.steps,), field="steps")
        if self.start < 0.0 or self.distance < 0.0:
            raise ParameterValidationError("sweep values must be non-negative", field="start")
        if self.method not in KEY_RATE_METHODS:
            raise ParameterValidationError("unknown key rate method %r" % (self.method,), field="method")

    @property
    def column(self):
        """str. Heading of the swept variable."""
        return SWEEP_VARIABLES[self.variable][0]

    def grid(self):
        """Grid values in display units, endpoints included."""
        return np.linspace(self.start, self.stop, int(self.steps))

    def columns(self):
        names = [self.column]
        for output in SWEEP_OUTPUTS:
            if output not in self.outputs:
                continue
            if output == "qber_breakdown":
                names.extend(QBER_COLUMNS)
            elif output == "sifted":
                names.append("sifted_bps")
            else:
                names.extend(c for c in KEYRATE_COLUMNS if c not in names)
        return names


@dataclass(frozen=True)
class SweepRow:
    values: dict
    clamped: bool = False
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepResult:
    """Rows of a sweep in grid order, with the row errors and clamp count."""
    columns: list
    rows: list
    errors: list
    clamped: int = 0


def evaluate_point(spec, setup, table, value):
    """Evaluate the outputs of `spec` at one grid value; failures become row errors."""
    value = float(value)
    values = {spec.column: value}
    try:
        system, geometry, r = setup.point(spec.variable, value, spec.distance)
        link = LinkBudget(system, setup.scenario, geometry, table)
        clamped = link.rates(r).clamped
        if "qber_breakdown" in spec.outputs:
            qber = link.qber(r, legacy=spec.legacy)
            values.update(q_opt=qber.q_opt, q_dc=qber.q_dc, q_bac=qber.q_bac,
                          q_scatter=qber.q_scatter, q_total=qber.total)
        if "sifted" in spec.outputs:
            values["sifted_bps"] = sifted_rate(system, setup.protocol, r)
        if "secure" in spec.outputs:
            row = key_rate_report(link, setup.protocol, r).as_row(spec.method)
            values.update((k, row[k]) for k in KEYRATE_COLUMNS)
    except UwqkdError as err:
        nan = float("nan")
        values.update((name, nan) for name in spec.columns()[1:])
        return SweepRow(values, False, str(err))
    return SweepRow(values, clamped)


def _evaluate_task(task):
    return evaluate_point(*task)


def sweep(spec, setup, table=None, workers=1):
    """
    Evaluate `spec` over its grid.

    Rows come back in grid order whatever the number of workers. A row
    that fails keeps NaN outputs and its message in an "error" column,
    present only when some row failed.

    :Args:

        spec: SweepSpec
            Grid and outputs.
        setup: LinkSetup
            Fixed parameters.
        table: RadianceTable, optional
            Background radiance. Defaults to the bundled table.
        workers: int, optional
            Worker processes, 1 evaluates in this process. Defaults to 1.

    """
    if table is None:
        table = RadianceTable.bundled()
    tasks = [(spec, setup, table, value) for value in spec.grid()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_evaluate_task(task) for task in tasks]

    columns = spec.columns()
    errors = [(i, row.error) for i, row in enumerate(results) if row.error is not None]
    rows = [row.values for row in results]
    if errors:
        columns = columns + ["error"]
        for i, row in enumerate(results):
            rows[i]["error"] = row.error or ""
        for i, message in errors:
            logger.warning("sweep row %d (%s=%g) failed: %s", i, spec.column, rows[i][spec.column], message)
    clamped = sum(1 for row in results if row.clamped)
    if clamped:
        logger.warning("radiance depth outside the table on %d of %d sweep rows, values clamped",
                       clamped, len(results))
    logger.debug("sweep of %s over %d points done", spec.variable, len(rows))
    return SweepResult(columns, rows, errors, clamped)


@dataclass(frozen=True)
class MaxDistanceQuery:
    """
    Criterion of a maximum secure distance search.

    :Args:

        criterion: str, optional
            "qber" (QBER at most `threshold`) or "rate" (positive secure
            rate of `method`). Defaults to "qber".
        threshold: float, optional
            QBER bound, in (0, 0.5]. Defaults to 0.11.
        tolerance: float, optional
            Bisection tolerance, m. Defaults to 0.1.
        cap: float, optional
            Largest range searched, m. Defaults to 1000.
        method: str, optional
            Key rate method of the "rate" criterion. Defaults to "decoy".
        legacy: bool, optional
            Use the legacy QBER formula. Defaults to False.
        initial_step: float, optional
            First bracket width, doubled until the criterion fails, m.
            Defaults to 10.

    """
    criterion: str = "qber"
    threshold: float = 0.11
    tolerance: float = 0.1
    cap: float = 1000.0
    method: str = "decoy"
    legacy: bool = False
    initial_step: float = 10.0

    def __post_init__(self):
        if self.criterion not in MAX_DISTANCE_CRITERIA:
            raise ParameterValidationError("criterion must be qber or rate, got %r" % (self.criterion,),
                                           field="criterion")
        if not 0.0 < self.threshold <= 0.5:
            raise ParameterValidationError("threshold must lie in (0, 0.5], got %r" % (self.threshold,),
                                           field="threshold")
        if not self.tolerance > 0.0:
            raise ParameterValidationError("tolerance must be positive", field="tolerance")
        if not (self.cap > 0.0 and self.initial_step > 0.0):
            raise ParameterValidationError("cap and initial_step must be positive", field="cap")
        if self.method not in KEY_RATE_METHODS[1:]:
            raise ParameterValidationError("rate criterion needs decoy, nodecoy or onedecoy", field="method")


@dataclass(frozen=True)
class MaxDistanceResult:
    """Largest range meeting the criterion, within the query tolerance."""
    distance: float
    monotone: bool
    criterion: str
    bracket: Tuple[float, float]


def _criterion(query, setup, link):
    if query.criterion == "qber":
        return lambda r: link.qber(r, legacy=query.legacy).total <= query.threshold
    return lambda r: key_rate_report(link, setup.protocol, r).secure(query.method) > 0.0


def max_secure_distance(query, setup, table=None):
    """
    Largest range at which the link still meets the criterion of `query`.

    The bracket doubles from `initial_step` up to `cap`, a scan of the
    bracket finds the first crossing and bisection narrows it to
    `tolerance`. A criterion met again past the first crossing gives a
    result flagged non monotone.

    :Args:

        query: MaxDistanceQuery
            Criterion and search settings.
        setup: LinkSetup
            Link to evaluate.
        table: RadianceTable, optional
            Background radiance. Defaults to the bundled table.

    """
    link = setup.link(table)
    satisfied = _criterion(query, setup, link)
    if not satisfied(0.0):
        raise InfeasibleQueryError("infeasible at zero range: %s criterion fails at r = 0" % query.criterion)

    hi = min(query.initial_step, query.cap)
    while satisfied(hi):
        if hi >= query.cap:
            raise InfeasibleQueryError("exceeds cap: %s criterion still met at %g m" % (query.criterion, query.cap))
        logger.debug("criterion met at %g m, doubling bracket", hi)
        hi = min(2.0 * hi, query.cap)

    grid = np.linspace(0.0, hi, SCAN_POINTS + 1)
    met = [satisfied(float(r)) for r in grid]
    first = met.index(False)
    monotone = not any(met[first:])
    lo, hi = float(grid[first - 1]), float(grid[first])
    bracket = (lo, hi)
    if not monotone:
        logger.warning("criterion met again beyond %g m, returning the first crossing", hi)

    while hi - lo > query.tolerance:
        middle = 0.5 * (lo + hi)
        if satisfied(middle):
            lo = middle
        else:
            hi = middle
    logger.debug("maximum distance %g m, bracket %g..%g m", lo, bracket[0], bracket[1])
    return MaxDistanceResult(lo, monotone, query.criterion, bracket)


if __name__ == "__main__":
    from .channel import ChannelScenario, PropagationMode
    from .qber import SystemParams
    for mode in PropagationMode:
        result = max_secure_distance(MaxDistanceQuery(), LinkSetup(SystemParams(), ChannelScenario(mode=mode)))
        print("%-10s maximum distance %.1f m" % (mode.name, result.distance))
