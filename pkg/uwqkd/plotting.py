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
Rendering of result CSV files with matplotlib.

A plot is described by a list of panels, each a dict with a title, axis
labels, a `logy` switch and a list of (csv file, x column, y column,
legend) series. The same description drives `render` and the standalone
scripts written by `write_plot_script`.

"""
from __future__ import annotations

import logging
import os
import pprint

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import read_csv
from .errors import OutputError

logger = logging.getLogger(__name__)

SCRIPT_TEMPLATE = '''\
"""Plot %(title)s from the CSV files next to this script."""
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
TITLE = %(title_literal)s
PANELS = %(panels)s


def read(name):
    with open(os.path.join(HERE, name), newline="") as handle:
        rows = list(csv.DictReader(handle))
    return {key: np.array([float(row[key]) if row[key] else np.nan for row in rows])
            for key in rows[0]} if rows else {}


def main(out=os.path.join(HERE, %(png_literal)s)):
    ncols = min(3, len(PANELS))
    nrows = (len(PANELS) + ncols - 1) // ncols
    fig, axs = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False)
    for ax, panel in zip(axs.flat, PANELS):
        for name, x, y, label in panel["series"]:
            data = read(name)
            values = data[y]
            if panel["logy"]:
                values = np.where(values > 0, values, np.nan)
            ax.plot(data[x], values, label=label)
        if panel["logy"]:
            ax.set_yscale("log")
        ax.set_title(panel["title"])
        ax.set_xlabel(panel["xlabel"])
        ax.set_ylabel(panel["ylabel"])
        ax.legend(fontsize="small")
    for ax in list(axs.flat)[len(PANELS):]:
        ax.set_visible(False)
    fig.suptitle(TITLE)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print(out)


if __name__ == "__main__":
    main()
'''


def render(title, panels, directory, png):
    """
    Render `panels` (CSV names relative to `directory`) into the PNG file
    `png`.
    """
    ncols = min(3, len(panels))
    nrows = (len(panels) + ncols - 1) // ncols
    fig, axs = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False)
    for ax, panel in zip(axs.flat, panels):
        for name, x, y, label in panel["series"]:
            data = read_csv(os.path.join(directory, name))
            values = data[y]
            if panel["logy"]:
                # Zero rates have no place on a log axis.
                values = np.where(values > 0, values, np.nan)
            ax.plot(data[x], values, label=label)
        if panel["logy"]:
            ax.set_yscale("log")
        ax.set_title(panel["title"])
        ax.set_xlabel(panel["xlabel"])
        ax.set_ylabel(panel["ylabel"])
        ax.legend(fontsize="small")
    for ax in list(axs.flat)[len(panels):]:
        ax.set_visible(False)
    fig.suptitle(title)
    fig.tight_layout()
    try:
        fig.savefig(png, dpi=150)
    except OSError as err:
        raise OutputError("cannot write %s: %s" % (png, err)) from None
    finally:
        plt.close(fig)
    logger.info("rendered %s", png)
    return png


def write_plot_script(title, panels, path, png_name):
    """
    Write a standalone matplotlib script plotting `panels` from the CSV
    files of its own directory into `png_name`.
    """
    text = SCRIPT_TEMPLATE % {"title": title, "title_literal": repr(title),
                              "panels": pprint.pformat(list(panels), indent=1, width=100, sort_dicts=True),
                              "png_literal": repr(png_name)}
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as err:
        raise OutputError("cannot write %s: %s" % (path, err)) from None
    logger.info("wrote plot script %s", path)
    return path


def single_csv_panels(csv_name, x, columns, title=""):
    """Panel description of one CSV file with one curve per column."""
    return [{"title": title, "xlabel": x, "ylabel": ", ".join(columns), "logy": False,
             "series": [(csv_name, x, y, y) for y in columns]}]
