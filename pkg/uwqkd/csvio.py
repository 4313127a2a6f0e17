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
Deterministic CSV output.

Numbers carry 6 significant digits. Non-zero magnitudes below 0.1 or
from 1e7 up are written in scientific notation with a bare exponent
(`4.97871e-2`), everything else positionally without trailing zeros.
Booleans become 1/0 and missing values (None, NaN) empty fields.

"""
from __future__ import annotations

import csv
import io
import logging
import math
import numbers
import sys

import numpy as np

from .errors import OutputError, ParameterValidationError

logger = logging.getLogger(__name__)

QBER_CSV_COLUMNS = ("r_m", "q_opt", "q_dc", "q_bac", "q_scatter", "q_total")
KEYRATE_CSV_COLUMNS = ("r_m", "sifted_bps", "secure_bps", "Y1", "Q1", "e1", "omega_untagged",
                       "insecure_flag")
SCIENTIFIC_BELOW = 0.1
SCIENTIFIC_FROM = 1e7


def format_value(x):
    """
    Text of one CSV field.

    >>> format_value(0.049787068367863944)
    '4.97871e-2'
    >>> format_value(18919.12)
    '18919.1'

    """
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    if isinstance(x, numbers.Integral):
        return str(int(x))
    value = float(x)
    if math.isnan(value):
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0"
    if abs(value) < SCIENTIFIC_BELOW or abs(value) >= SCIENTIFIC_FROM:
        return np.format_float_scientific(value, precision=5, unique=False, trim="-", exp_digits=1)
    return np.format_float_positional(value, precision=6, unique=False, fractional=False, trim="-")


def _write(handle, rows, columns):
    writer = csv.writer(handle, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[name]) for name in columns])


def emit_csv(rows, path, columns=None):
    """
    Write `rows` (mappings sharing the same keys) as CSV.

    :Args:

        rows: list of dict
            Rows to write.
        path: str or file object
            Destination file, "-" for standard output.
        columns: sequence of str, optional
            Column order. Defaults to the keys of the first row; required
            for an empty row set.

    """
    rows = list(rows)
    if columns is None:
        if not rows:
            raise ParameterValidationError("columns are needed to write an empty row set", field="columns")
        columns = list(rows[0])
    columns = list(columns)
    expected = set(columns)
    for i, row in enumerate(rows):
        if set(row) != expected:
            raise ParameterValidationError("row %d does not have the columns %s" % (i, ",".join(columns)),
                                           field="rows")
    if path == "-":
        _write(sys.stdout, rows, columns)
        return
    if hasattr(path, "write"):
        _write(path, rows, columns)
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            _write(handle, rows, columns)
    except OSError as err:
        raise OutputError("cannot write %s: %s" % (path, err)) from None
    logger.info("wrote %d rows to %s", len(rows), path)


def csv_text(rows, columns=None):
    """Return the CSV text `emit_csv` would write."""
    buffer = io.StringIO(newline="")
    emit_csv(rows, buffer, columns)
    return buffer.getvalue()


def read_csv(path):
    """
    Read a CSV written by `emit_csv` into a dict of float arrays. Empty
    fields become NaN, non numeric columns are skipped.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, [])
            records = list(reader)
    except OSError as err:
        raise OutputError("cannot read %s: %s" % (path, err)) from None
    data = {}
    for j, name in enumerate(header):
        try:
            data[name] = np.array([float(r[j]) if r[j] != "" else np.nan for r in records])
        except ValueError:
            logger.debug("column %s of %s is not numeric, skipped", name, path)
    return data
