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
Command-line front end.

    uwqkd contrast --worst-case ordinary
    uwqkd qber --preset ordinary --mode D --distance 100 --compare
    uwqkd keyrate --preset optimal --distance 100 --method decoy
    uwqkd sweep --var distance --from 0 --to 300 --steps 301 --out q.csv
    uwqkd max-distance --criterion qber --threshold 0.11
    uwqkd reproduce components --outdir out --png

Results go to standard output or files, log records to standard error.
The exit status is 0 on success, 2 for configuration errors, 3 for
infeasible queries, 4 for radiance table gaps and 1 otherwise.

"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import version
from .channel import LunarPhase, PropagationMode, WaterType
from .config import PRESETS, dump_config, from_preset, load_config, load_train, resolve_table
from .csvio import KEYRATE_CSV_COLUMNS, QBER_CSV_COLUMNS, emit_csv
from .errors import ConfigError, UwqkdError
from .figures import FIGURE_ALIASES, FIGURES, reproduce
from .keyrate import KEY_RATE_METHODS, key_rate_report
from .plotting import single_csv_panels, write_plot_script
from .stokes import STATE_ANGLES, contrast
from .sweep import (MAX_DISTANCE_CRITERIA, SWEEP_OUTPUTS, SWEEP_VARIABLES, MaxDistanceQuery, SweepSpec,
                    max_secure_distance, sweep)
from .tolerance import TOLERANCE_PRESETS, worst_case_contrast

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"
VERBOSITY_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _document(args):
    """ConfigDocument of a run: config file or preset, then command-line channel overrides."""
    if args.config is not None:
        doc = load_config(args.config, preset=args.preset)
    else:
        doc = from_preset(args.preset or "ordinary")
    changes = {}
    if args.water_type is not None:
        changes["water_type"] = WaterType.parse(args.water_type)
        if args.chi_c is None:
            changes["chi_c"] = changes["water_type"].nominal_chi
    if args.chi_c is not None:
        changes["chi_c"] = args.chi_c
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.lunar_phase is not None:
        changes["lunar_phase"] = args.lunar_phase
    if changes:
        doc = doc.replace_scenario(**changes)
    if args.kd_ratio is not None:
        if not args.kd_ratio > 0.0:
            raise ConfigError("--kd-ratio must be positive, got %r" % args.kd_ratio)
        doc = replace(doc, radiance=None, kd_ratio=args.kd_ratio)
    return doc


def _protocol(args, doc):
    changes = {name: getattr(args, name) for name in ("mu", "nu") if getattr(args, name, None) is not None}
    return replace(doc.protocol, **changes) if changes else doc.protocol


def cmd_contrast(args):
    if args.worst_case is not None:
        report = worst_case_contrast(TOLERANCE_PRESETS[args.worst_case])
        rows = [{"quantity": "P_HV", "value": report.p_hv}, {"quantity": "P_DM", "value": report.p_dm},
                {"quantity": "P", "value": report.p}, {"quantity": "corners", "value": report.corners}]
        logger.debug("worst HV corner %s, worst DM corner %s", report.hv_corner, report.dm_corner)
    else:
        train = load_train(args.train)
        rows = [{"quantity": "P", "value": contrast(train, args.state)}]
    emit_csv(rows, args.out, columns=("quantity", "value"))
    return 0


def cmd_qber(args):
    doc = _document(args)
    link = doc.link(resolve_table(doc, args.radiance))
    if args.compare:
        rows = []
        for legacy in (False, True):
            row = {"formula": "legacy" if legacy else "modified"}
            row.update(link.qber(args.distance, legacy=legacy).as_row(args.distance))
            rows.append(row)
        emit_csv(rows, args.out, columns=("formula",) + QBER_CSV_COLUMNS)
    else:
        emit_csv([link.qber(args.distance, legacy=args.legacy).as_row(args.distance)], args.out,
                 columns=QBER_CSV_COLUMNS)
    return 0


def cmd_keyrate(args):
    doc = _document(args)
    link = doc.link(resolve_table(doc, args.radiance))
    report = key_rate_report(link, _protocol(args, doc), args.distance)
    if report.flags:
        logger.info("key rate flags at %g m: %s", args.distance, report.flags)
    emit_csv([report.as_row(args.method)], args.out, columns=KEYRATE_CSV_COLUMNS)
    return 0


def cmd_sweep(args):
    if args.plot_script is not None and args.out == "-":
        raise ConfigError("--plot-script needs --out to name the CSV file it plots")
    doc = _document(args)
    table = resolve_table(doc, args.radiance)
    spec = SweepSpec(args.var, getattr(args, "from"), args.to, args.steps,
                     tuple(name.strip() for name in args.outputs.split(",") if name.strip()),
                     args.distance, args.legacy, args.method)
    setup = replace(doc.setup(), protocol=_protocol(args, doc))
    result = sweep(spec, setup, table, args.workers)
    emit_csv(result.rows, args.out, columns=result.columns)
    if args.plot_script is not None:
        csv_name = os.path.relpath(os.path.abspath(args.out), os.path.dirname(os.path.abspath(args.plot_script)))
        y_columns = [c for c in result.columns[1:] if c not in ("insecure_flag", "error")]
        png_name = os.path.splitext(os.path.basename(args.plot_script))[0] + ".png"
        write_plot_script("%s sweep" % args.var, single_csv_panels(csv_name, spec.column, y_columns),
                          args.plot_script, png_name)
    if result.errors:
        logger.warning("%d of %d sweep rows failed", len(result.errors), len(result.rows))
    return 0


def cmd_max_distance(args):
    doc = _document(args)
    table = resolve_table(doc, args.radiance)
    query = MaxDistanceQuery(args.criterion, args.threshold, args.tolerance, args.cap, args.method,
                             args.legacy)
    setup = replace(doc.setup(), protocol=_protocol(args, doc))
    result = max_secure_distance(query, setup, table)
    emit_csv([{"max_distance_m": result.distance, "monotone": result.monotone,
               "bracket_lo_m": result.bracket[0], "bracket_hi_m": result.bracket[1]}], args.out,
             columns=("max_distance_m", "monotone", "bracket_lo_m", "bracket_hi_m"))
    return 0


def cmd_reproduce(args):
    doc = _document(args)
    table = resolve_table(doc, args.radiance)
    for path in reproduce(args.figure, args.outdir, table, args.workers, args.png):
        print(path)
    return 0


def cmd_show_config(args):
    doc = _document(args)
    if args.out == "-":
        sys.stdout.write(dump_config(doc))
    else:
        dump_config(doc, args.out)
    return 0


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("link parameters")
    group.add_argument("--config", default=None, help="INI configuration file.")
    group.add_argument("--preset", choices=list(PRESETS), default=None,
                       help="Parameter preset, used when the configuration does not name one (default: ordinary).")
    table = group.add_mutually_exclusive_group()
    table.add_argument("--radiance", default=None, help="Radiance table CSV overriding the configured one.")
    table.add_argument("--kd-ratio", type=float, default=None,
                       help="Use a synthesized radiance table with K_d = KD_RATIO * chi of the water type.")
    group.add_argument("--mode", choices=[m.value for m in PropagationMode], default=None,
                       help="Propagation mode override.")
    group.add_argument("--water-type", choices=[w.value for w in WaterType], default=None,
                       help="Jerlov water type override; sets chi_c to its nominal value unless --chi-c is given.")
    group.add_argument("--chi-c", type=float, default=None, help="Beam attenuation coefficient override, 1/m.")
    group.add_argument("--lunar-phase", choices=[p.value for p in LunarPhase], default=None,
                       help="Moon phase override.")
    return common


def _add_protocol_arguments(parser):
    parser.add_argument("--mu", type=float, default=None, help="Signal intensity override.")
    parser.add_argument("--nu", type=float, default=None, help="Decoy intensity override.")
    parser.add_argument("--method", choices=KEY_RATE_METHODS, default="decoy",
                        help="Key rate method.")


def build_parser():
    parser = argparse.ArgumentParser(prog="uwqkd", description="Underwater BB84 polarization link budget.",
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--version", action="version", version="%(prog)s " + version())
    parser.add_argument("--verbosity", choices=VERBOSITY_LEVELS, default="INFO",
                        help="Set the logging verbosity level.")
    sub = parser.add_subparsers(dest="cmd", required=True)
    common = _common_parser()

    p = sub.add_parser("contrast", help="Polarization contrast of an optical train or a tolerance box.")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--train", default=None, help="Optical train file.")
    which.add_argument("--worst-case", choices=list(TOLERANCE_PRESETS), default=None,
                       help="Worst-case search over a tolerance preset.")
    p.add_argument("--state", choices=list(STATE_ANGLES), default="H", help="Nominal state sent through --train.")
    p.add_argument("--out", default="-", help="Output CSV, - for standard output.")
    p.set_defaults(func=cmd_contrast)

    p = sub.add_parser("qber", parents=[common], help="QBER breakdown at one range.")
    p.add_argument("--distance", type=float, required=True, help="Link range, m.")
    p.add_argument("--legacy", action="store_true", help="Use the legacy QBER formula.")
    p.add_argument("--compare", action="store_true", help="Print the modified and legacy breakdowns.")
    p.add_argument("--out", default="-", help="Output CSV, - for standard output.")
    p.set_defaults(func=cmd_qber)

    p = sub.add_parser("keyrate", parents=[common], help="Sifted and secure key rates at one range.")
    p.add_argument("--distance", type=float, required=True, help="Link range, m.")
    _add_protocol_arguments(p)
    p.add_argument("--out", default="-", help="Output CSV, - for standard output.")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("sweep", parents=[common], help="Evaluate a linear grid of range, FOV or aperture.")
    p.add_argument("--var", choices=list(SWEEP_VARIABLES), default="distance",
                   help="Swept variable: distance (m), fov (mrad) or aperture (cm2).")
    p.add_argument("--from", type=float, required=True, help="First grid value.")
    p.add_argument("--to", type=float, required=True, help="Last grid value.")
    p.add_argument("--steps", type=int, required=True, help="Number of grid points.")
    p.add_argument("--distance", type=float, default=100.0, help="Range of fov and aperture sweeps, m.")
    p.add_argument("--outputs", default="qber_breakdown",
                   help="Comma separated outputs among %s." % ", ".join(SWEEP_OUTPUTS))
    p.add_argument("--legacy", action="store_true", help="Use the legacy QBER formula.")
    _add_protocol_arguments(p)
    p.add_argument("--workers", type=int, default=1, help="Worker processes.")
    p.add_argument("--out", default="-", help="Output CSV, - for standard output.")
    p.add_argument("--plot-script", default=None, help="Also write a matplotlib script plotting --out.")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("max-distance", parents=[common], help="Largest range meeting a QBER or rate criterion.")
    p.add_argument("--criterion", choices=MAX_DISTANCE_CRITERIA, default="qber", help="Search criterion.")
    p.add_argument("--threshold", type=float, default=0.11, help="QBER bound of the qber criterion.")
    p.add_argument("--tolerance", type=float, default=0.1, help="Bisection tolerance, m.")
    p.add_argument("--cap", type=float, default=1000.0, help="Largest range searched, m.")
    p.add_argument("--legacy", action="store_true", help="Use the legacy QBER formula.")
    _add_protocol_arguments(p)
    p.add_argument("--out", default="-", help="Output CSV, - for standard output.")
    p.set_defaults(func=cmd_max_distance)

    p = sub.add_parser("reproduce", parents=[common], help="Canonical figure sweeps, CSV files and plot script.")
    p.add_argument("figure", choices=list(FIGURES) + list(FIGURE_ALIASES), help="Figure to reproduce.")
    p.add_argument("--outdir", default=".", help="Output directory.")
    p.add_argument("--png", action="store_true", help="Also render the figure with matplotlib.")
    p.add_argument("--workers", type=int, default=1, help="Worker processes.")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("show-config", parents=[common], help="Print the resolved configuration.")
    p.add_argument("--out", default="-", help="Output file, - for standard output.")
    p.set_defaults(func=cmd_show_config)
    return parser


def main(argv=None):
    """Run the command line `argv` (defaults to sys.argv[1:]) and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, datefmt=LOG_DATEFMT)
    logging.getLogger().setLevel(args.verbosity)
    logger.info("uwqkd %s started", args.cmd)
    try:
        status = args.func(args)
    except UwqkdError as err:
        logger.critical("%s: %s", type(err).__name__, err)
        return err.exit_code
    except Exception as err:
        logger.critical("unexpected error: %s", err, exc_info=True)
        return 1
    logger.info("uwqkd %s done", args.cmd)
    return status


if __name__ == "__main__":
    sys.exit(main())
