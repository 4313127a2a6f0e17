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
Exceptions raised by the uwqkd package.

Every error derives from `UwqkdError` and carries the process exit code
the command-line front end returns when the error ends a run.

"""


class UwqkdError(Exception):
    """Base class of every error raised by the package."""
    exit_code = 1


class ParameterValidationError(UwqkdError, ValueError):
    """
    Raised when a physical or protocol parameter is out of its domain.

    :Args:

        message: str
            Human readable description.
        field: str, optional
            Name of the offending record field. Defaults to None.

    """
    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConfigError(UwqkdError):
    """
    Raised for unreadable, malformed or inconsistent configuration files.

    :Args:

        message: str
            Human readable description.
        path: str, optional
            File being read. Defaults to None.
        lineno: int, optional
            One-based line number of the offending line. Defaults to None.

    """
    exit_code = 2

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        location = ""
        if path is not None:
            location = str(path)
            if lineno is not None:
                location += ":%d" % lineno
            location += ": "
        super().__init__(location + message)


class InfeasibleQueryError(UwqkdError):
    """Raised when a maximum-distance query has no finite answer."""
    exit_code = 3


class TableGapError(UwqkdError, LookupError):
    """Raised when a radiance table cannot serve a scenario."""
    exit_code = 4


class ExtinguishedError(UwqkdError, ArithmeticError):
    """Raised when an optical train blocks all power of a state."""


class NoCountsError(UwqkdError, ArithmeticError):
    """Raised when a QBER is requested for a link that registers no clicks."""


class NoSingleYieldError(UwqkdError, ArithmeticError):
    """Raised when the decoy bound leaves no single-photon yield."""


class OutputError(UwqkdError):
    """Raised when a result file cannot be written."""
