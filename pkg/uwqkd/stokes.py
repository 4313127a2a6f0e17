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
Stokes-vector and Mueller-matrix calculus for BB84 optical trains.

Element matrices follow the usual intensity conventions: a polarizer
transmits half of an unpolarized beam, beam splitters act as
diattenuating retarders and wave plates are pure retarders. The
polarization contrast of a train is the share of the analyzed power
that lands in the wrong analyzer port.

"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache, reduce
from typing import Iterable, Optional, Union

import numpy as np

from .errors import ExtinguishedError, ParameterValidationError

logger = logging.getLogger(__name__)

PHYSICAL_TOL = 1e-12
SPLIT_SUM_TOL = 1e-9

# Transmitter polarizer angles of the four BB84 states.
STATE_ANGLES = {"H": 0.0, "V": math.pi / 2, "D": math.pi / 4, "M": 3 * math.pi / 4}
PATH_LABELS = ("HV", "DM")


def _require_finite(field, value):
    """Return `value` as a float, rejecting NaN and infinities."""
    value = float(value)
    if not math.isfinite(value):
        raise ParameterValidationError("%s must be finite, got %r" % (field, value), field=field)
    return value


def _require_fraction(field, value):
    """Return `value` as a float, rejecting anything outside [0, 1]."""
    value = _require_finite(field, value)
    if not 0.0 <= value <= 1.0:
        raise ParameterValidationError("%s must lie in [0, 1], got %r" % (field, value), field=field)
    return value


@dataclass(frozen=True)
class StokesVector:
    """
    Stokes description of a (partially) polarized beam.

    :Args:

        s0: float
            Total power, in arbitrary units.
        s1: float, optional
            Horizontal minus vertical power. Defaults to 0.
        s2: float, optional
            Diagonal (45 degrees) minus antidiagonal power. Defaults to 0.
        s3: float, optional
            Right minus left circular power. Defaults to 0.

    >>> h = StokesVector(1, 1, 0, 0)
    >>> h.dop
    1.0

    """
    s0: float
    s1: float = 0.0
    s2: float = 0.0
    s3: float = 0.0

    def __post_init__(self):
        for name in ("s0", "s1", "s2", "s3"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))

    @classmethod
    def from_array(cls, values):
        """Build a vector from any four-element sequence."""
        arr = np.asarray(values, dtype=float).reshape(4)
        return cls(*arr.tolist())

    def as_array(self):
        """Return the components as a numpy array."""
        return np.array([self.s0, self.s1, self.s2, self.s3])

    @property
    def polarized(self):
        """float. Polarized power, sqrt(s1**2 + s2**2 + s3**2)."""
        return math.hypot(self.s1, self.s2, self.s3)

    @property
    def dop(self):
        """float. Degree of polarization (0 for a dark beam)."""
        if self.s0 <= 0.0:
            return 0.0 if self.polarized == 0.0 else math.inf
        return self.polarized / self.s0

    def is_physical(self, tol=PHYSICAL_TOL):
        """True when s0 >= 0 and the degree of polarization is at most one."""
        return self.s0 >= -tol and self.polarized <= self.s0 * (1.0 + tol) + tol

    def scaled(self, factor):
        """Return the vector with every component multiplied by `factor`."""
        return StokesVector.from_array(self.as_array() * factor)


def nominal_state(label):
    """Unit-power Stokes vector of the BB84 state `label` (H, V, D or M)."""
    states = {"H": (1.0, 1.0, 0.0, 0.0), "V": (1.0, -1.0, 0.0, 0.0),
              "D": (1.0, 0.0, 1.0, 0.0), "M": (1.0, 0.0, -1.0, 0.0)}
    try:
        return StokesVector(*states[str(label).upper()])
    except KeyError:
        raise ParameterValidationError("unknown BB84 state %r (expected H, V, D or M)" % (label,),
                                       field="state") from None


@dataclass(frozen=True, eq=False)
class MuellerMatrix:
    """
    Read-only 4x4 real matrix acting on Stokes vectors.

    Matrices compose with the `@` operator in the usual right-to-left
    order: `(b @ a).apply(s)` equals `b.apply(a.apply(s))`.

    """
    m: np.ndarray

    def __post_init__(self):
        arr = np.array(self.m, dtype=float)
        if arr.shape != (4, 4):
            raise ParameterValidationError("a Mueller matrix must be 4x4, got shape %s" % (arr.shape,),
                                           field="m")
        if not np.all(np.isfinite(arr)):
            raise ParameterValidationError("Mueller matrix entries must be finite", field="m")
        arr.setflags(write=False)
        object.__setattr__(self, "m", arr)

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    def apply(self, stokes):
        """Return the Stokes vector emerging from this element."""
        return StokesVector.from_array(self.m @ stokes.as_array())

    def __matmul__(self, other):
        if isinstance(other, MuellerMatrix):
            return MuellerMatrix(self.m @ other.m)
        if isinstance(other, StokesVector):
            return self.apply(other)
        return NotImplemented

    def __getitem__(self, index):
        return self.m[index]

    def allclose(self, other, atol=1e-12):
        """True when both matrices agree element-wise within `atol`."""
        other = other.m if isinstance(other, MuellerMatrix) else np.asarray(other, dtype=float)
        return bool(np.allclose(self.m, other, rtol=0.0, atol=atol))

    def __repr__(self):
        return "MuellerMatrix(%s)" % np.array2string(self.m, precision=6)


@dataclass(frozen=True)
class PolarizerSpec:
    """
    Linear polarizer with finite extinction.

    :Args:

        epsilon: float, optional
            Amplitude extinction, between 0 (ideal) and 1 (no polarizer).
            The power extinction ratio is `epsilon ** 2`. Defaults to 0.
        theta: float, optional
            Transmission-axis angle in radians. Defaults to 0.

    """
    epsilon: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _require_fraction("epsilon", self.epsilon))
        object.__setattr__(self, "theta", _require_finite("theta", self.theta))


@dataclass(frozen=True)
class WavePlateSpec:
    """
    Linear retarder.

    :Args:

        delta: float, optional
            Retardance between fast and slow axes, in radians. A half wave
            plate has `delta = pi`. Defaults to pi.
        theta: float, optional
            Fast-axis angle in radians. Defaults to 0.

    """
    delta: float = math.pi
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "delta", _require_finite("delta", self.delta))
        object.__setattr__(self, "theta", _require_finite("theta", self.theta))


@dataclass(frozen=True)
class BeamSplitterSpec:
    """
    Non-polarizing beam splitter with residual p/s imbalance.

    :Args:

        tp, ts: float, optional
            Power transmissivities of the p and s components. Defaults to 0.5.
        rp, rs: float, optional
            Power reflectivities of the p and s components. Defaults to 0.5.
        phi_t, phi_r: float, optional
            p/s phase difference on transmission and on reflection, in
            radians. Defaults to 0.

    """
    tp: float = 0.5
    ts: float = 0.5
    rp: float = 0.5
    rs: float = 0.5
    phi_t: float = 0.0
    phi_r: float = 0.0

    def __post_init__(self):
        for name in ("tp", "ts", "rp", "rs"):
            object.__setattr__(self, name, _require_fraction(name, getattr(self, name)))
        for name in ("phi_t", "phi_r"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.tp + self.rp > 1.0 + SPLIT_SUM_TOL:
            raise ParameterValidationError("tp + rp exceeds 1 (%r)" % (self.tp + self.rp), field="tp")
        if self.ts + self.rs > 1.0 + SPLIT_SUM_TOL:
            raise ParameterValidationError("ts + rs exceeds 1 (%r)" % (self.ts + self.rs), field="ts")

    @classmethod
    def reflecting(cls, rp, rs, phi_r=0.0):
        """Lossless splitter described by its reflected port."""
        return cls(tp=1.0 - rp, ts=1.0 - rs, rp=rp, rs=rs, phi_r=phi_r)

    @classmethod
    def transmitting(cls, tp, ts, phi_t=0.0):
        """Lossless splitter described by its transmitted port."""
        return cls(tp=tp, ts=ts, rp=1.0 - tp, rs=1.0 - ts, phi_t=phi_t)


@lru_cache(maxsize=4096)
def polarizer_matrix(spec):
    """
    Mueller matrix of a partial polarizer, normalized so that an ideal
    polarizer passes half of an unpolarized beam.

    The M23/M32 cross term keeps the matrix physical at arbitrary angles.

    """
    eps = spec.epsilon
    e2 = eps * eps
    c, s = math.cos(2 * spec.theta), math.sin(2 * spec.theta)
    m = np.zeros((4, 4))
    m[0, 0] = 1 + e2
    m[1, 1] = (1 + e2) * c * c + 2 * eps * s * s
    m[2, 2] = (1 + e2) * s * s + 2 * eps * c * c
    m[3, 3] = 2 * eps
    m[0, 1] = m[1, 0] = (1 - e2) * c
    m[0, 2] = m[2, 0] = (1 - e2) * s
    m[1, 2] = m[2, 1] = (1 + e2 - 2 * eps) * c * s
    return MuellerMatrix(0.5 * m)


@lru_cache(maxsize=4096)
def waveplate_matrix(spec):
    """Mueller matrix of a linear retarder."""
    c, s = math.cos(2 * spec.theta), math.sin(2 * spec.theta)
    cd, sd = math.cos(spec.delta), math.sin(spec.delta)
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1, 1] = c * c + cd * s * s
    m[2, 2] = c * c * cd + s * s
    m[3, 3] = cd
    m[1, 2] = m[2, 1] = c * s - c * cd * s
    m[1, 3] = -s * sd
    m[3, 1] = s * sd
    m[2, 3] = c * sd
    m[3, 2] = -c * sd
    return MuellerMatrix(m)


def _splitter_port(p, s, phi):
    """Diattenuating retarder with power fractions `p`, `s` and phase `phi`."""
    root = math.sqrt(p * s)
    m = np.zeros((4, 4))
    m[0, 0] = m[1, 1] = 0.5 * (p + s)
    m[0, 1] = m[1, 0] = 0.5 * (p - s)
    m[2, 2] = m[3, 3] = root * math.cos(phi)
    m[2, 3] = -root * math.sin(phi)
    m[3, 2] = root * math.sin(phi)
    return MuellerMatrix(m)


@lru_cache(maxsize=4096)
def bs_transmit_matrix(spec):
    """Mueller matrix of the transmitted port of a beam splitter."""
    return _splitter_port(spec.tp, spec.ts, spec.phi_t)


@lru_cache(maxsize=4096)
def bs_reflect_matrix(spec):
    """Mueller matrix of the reflected port of a beam splitter."""
    return _splitter_port(spec.rp, spec.rs, spec.phi_r)


ELEMENT_SPECS = {"polarizer": PolarizerSpec, "waveplate": WavePlateSpec,
                 "bs_t": BeamSplitterSpec, "bs_r": BeamSplitterSpec}


def get_element_builder(kind):
    """
    Return the matrix constructor of an element from its kind as a string.
    """
    builders = {"polarizer": polarizer_matrix, "waveplate": waveplate_matrix,
                "bs_t": bs_transmit_matrix, "bs_r": bs_reflect_matrix}
    try:
        return builders[kind]
    except KeyError:
        raise ParameterValidationError("unknown element kind %r (expected one of %s)"
                                       % (kind, ", ".join(builders)), field="kind") from None


@dataclass(frozen=True)
class OpticalElement:
    """
    One element of an optical train: its kind and its specification.

    :Args:

        kind: str {"polarizer", "waveplate", "bs_t", "bs_r"}
            Element kind. `bs_t` and `bs_r` use the transmitted and the
            reflected port of a beam splitter.
        spec: PolarizerSpec, WavePlateSpec or BeamSplitterSpec
            Specification matching `kind`.

    """
    kind: str
    spec: object

    def __post_init__(self):
        get_element_builder(self.kind)
        if not isinstance(self.spec, ELEMENT_SPECS[self.kind]):
            raise ParameterValidationError("a %s element needs a %s, got %s"
                                           % (self.kind, ELEMENT_SPECS[self.kind].__name__,
                                              type(self.spec).__name__), field="spec")

    def matrix(self):
        return get_element_builder(self.kind)(self.spec)

    def rotated(self, angle):
        """Return the element turned by `angle` radians about the beam axis."""
        if self.kind not in ("polarizer", "waveplate"):
            raise ParameterValidationError("a %s element cannot be rotated" % self.kind, field="kind")
        return OpticalElement(self.kind, replace(self.spec, theta=self.spec.theta + angle))


def polarizer_element(epsilon=0.0, theta=0.0):
    return OpticalElement("polarizer", PolarizerSpec(epsilon, theta))


def waveplate_element(delta=math.pi, theta=0.0):
    return OpticalElement("waveplate", WavePlateSpec(delta, theta))


def _element_matrix(element):
    if isinstance(element, MuellerMatrix):
        return element
    return element.matrix()


class OpticalTrain:
    """
    Ordered chain of optical elements crossed by the states of one basis.

    The first element of the list is the first one met by the light.
    A train is immutable: the matrix product is computed once at
    construction and every transformation returns a new train.

    :Args:

        elements: list of OpticalElement or MuellerMatrix
            Elements in optical order. Raw Mueller matrices are accepted
            but cannot be rotated.
        path_label: str {"HV", "DM"}, optional
            Basis whose states travel through the train. Defaults to "HV".

    >>> train = OpticalTrain([polarizer_element(0.01, 0.0),
    ...                       OpticalElement("bs_t", BeamSplitterSpec()),
    ...                       polarizer_element(0.01, 0.0)])
    >>> contrast(train, "H") < 1e-3
    True

    """
    def __init__(self, elements, path_label="HV"):
        # Raw arguments so that we can retrieve them with the attribute syntax.
        self._elements = tuple(elements)
        self._path_label = str(path_label).upper()
        if not self._elements:
            raise ParameterValidationError("an optical train needs at least one element", field="elements")
        for element in self._elements:
            if not isinstance(element, (OpticalElement, MuellerMatrix)):
                raise ParameterValidationError("train elements must be OpticalElement or MuellerMatrix, got %s"
                                               % type(element).__name__, field="elements")
        if self._path_label not in PATH_LABELS:
            raise ParameterValidationError("path label must be HV or DM, got %r" % (path_label,),
                                           field="path_label")
        # Left-multiply so that the first element acts first.
        self._matrix = reduce(lambda acc, element: _element_matrix(element) @ acc,
                              self._elements, MuellerMatrix.identity())

    def matrix(self):
        """Return the Mueller matrix of the whole train."""
        return self._matrix

    def apply(self, stokes):
        """Return the Stokes vector leaving the train for input `stokes`."""
        return apply(self, stokes)

    def with_analyzer_rotated(self, angle):
        """Return a copy of the train with its analyzer turned by `angle` radians."""
        if self.analyzer is None:
            raise ParameterValidationError("the train does not end with a polarizer", field="elements")
        return OpticalTrain(self._elements[:-1] + (self.analyzer.rotated(angle),), self._path_label)

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __repr__(self):
        kinds = [getattr(el, "kind", "matrix") for el in self._elements]
        return "OpticalTrain(%s, path_label=%r)" % (" -> ".join(kinds), self._path_label)

    @property
    def elements(self):
        """tuple. Elements in optical order."""
        return self._elements

    @property
    def path_label(self):
        """str. Basis label, HV or DM."""
        return self._path_label

    @property
    def analyzer(self):
        """OpticalElement or None. Terminal polarizer, if any."""
        last = self._elements[-1]
        if isinstance(last, OpticalElement) and last.kind == "polarizer":
            return last
        return None


def apply(train, stokes):
    """
    Propagate `stokes` through `train`, first element first.

    Raises ParameterValidationError for an unphysical input vector.

    """
    if not stokes.is_physical():
        raise ParameterValidationError("input Stokes vector %r is not physical" % (stokes,), field="stokes")
    return train.matrix().apply(stokes)


def _resolve_state(nominal):
    """Return the nominal Stokes vector and the index of its linear axis (1 or 2)."""
    if not isinstance(nominal, StokesVector):
        nominal = nominal_state(nominal)
    if nominal.s1 == 0.0 and nominal.s2 == 0.0:
        raise ParameterValidationError("nominal state must be linearly polarized along s1 or s2",
                                       field="nominal")
    axis = 1 if abs(nominal.s1) >= abs(nominal.s2) else 2
    return nominal, axis


def contrast(train, nominal):
    """
    Polarization contrast P of `train` for the nominal state.

    With a terminal analyzer, both analyzer ports are evaluated and P is
    the weaker port's share of the analyzed power. Without one, P follows
    from the output Stokes vector along the nominal state's axis.

    :Args:

        train: OpticalTrain
            Train to evaluate.
        nominal: str or StokesVector
            One of "H", "V", "D", "M", or a linear Stokes vector of any
            power.

    Returns a float in [0, 0.5]. Raises ExtinguishedError when no power
    reaches the detectors.

    """
    state, axis = _resolve_state(nominal)
    if train.analyzer is not None:
        through = train.apply(state).s0
        crossed = train.with_analyzer_rotated(math.pi / 2).apply(state).s0
        total = through + crossed
        if total <= 0.0:
            raise ExtinguishedError("fully extinguished: no power reaches either analyzer port")
        return min(0.5, max(0.0, min(through, crossed) / total))
    out = train.apply(state)
    if out.s0 <= 0.0:
        raise ExtinguishedError("fully extinguished: output power is %r" % out.s0)
    u = out.s1 if axis == 1 else out.s2
    return min(0.5, max(0.0, (out.s0 - abs(u)) / (2.0 * out.s0)))


if __name__ == "__main__":
    d = nominal_state("D")
    reflect = bs_reflect_matrix(BeamSplitterSpec.reflecting(0.55, 0.45, math.radians(9)))
    print("D after one reflection:", reflect.apply(d))
    train = OpticalTrain([polarizer_element(0.01, math.pi / 4),
                          waveplate_element(math.pi, math.pi / 4),
                          OpticalElement("bs_r", BeamSplitterSpec.reflecting(0.55, 0.45, math.radians(9))),
                          OpticalElement("bs_r", BeamSplitterSpec.reflecting(0.55, 0.45, math.radians(9))),
                          waveplate_element(math.pi, math.pi / 4),
                          polarizer_element(0.01, math.pi / 4)], path_label="DM")
    print(train)
    print("P(D) =", contrast(train, "D"))
