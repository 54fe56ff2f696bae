"""Scenario documents: JSON schema version 1.

A scenario bundles an input state, an observable, exactly one measurement
description and optionally a value assignment and an offset ``b_psi``::

    {
      "version": 1,
      "dim": 2,
      "state": [[re, im], ...],
      "observable": [[[re, im], ...], ...],          # row-major
      "measurement": {"basis": {"labels": [...], "vectors": [state, ...]}}
                   | {"povm": {"labels": [...], "elements": [matrix, ...]}}
                   | {"apparatus": {"meter_dim": 2, "meter_init": state,
                                    "unitary": matrix, "readout": basis}}
                   | {"coupling": {"phi": 0.1, "observable": matrix,
                                   "readout": basis, "postselect": basis}},
      "assignment": {"label": value or null, ...},
      "b_psi": 0.0
    }

Complex numbers are ``[re, im]`` pairs; a bare real number is also accepted
on input. ``labels`` are optional. In ``coupling`` the observable defaults to
the scenario observable, the meter readout to the Z basis and the system
post-selection basis (used by ``weakmeas``) to the computational basis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .apparatus import Apparatus, CouplingFamily, induced_povm
from .error_analysis import ValueAssignment
from .errors import ParseError, QMeterError
from .hilbert import NORM_TOL, Ket, Observable
from .measurement import (Povm, ProjectiveBasis, basis_to_povm, povm_as_basis,
                          validate_povm, z_basis)

SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class Coupling:
    family: CouplingFamily
    readout: ProjectiveBasis
    postselect: ProjectiveBasis

    def __eq__(self, other):
        if not isinstance(other, Coupling):
            return NotImplemented
        return (self.family == other.family and self.readout == other.readout
                and self.postselect == other.postselect)

    def apparatus(self) -> Apparatus:
        return self.family.apparatus(self.readout)


Measurement = Union[ProjectiveBasis, Povm, Apparatus, Coupling]


@dataclass(frozen=True)
class Scenario:
    dim: int
    state: Ket
    observable: Observable
    measurement: Measurement
    assignment: ValueAssignment | None = None
    b_psi: float = 0.0

    @property
    def kind(self) -> str:
        return {ProjectiveBasis: "basis", Povm: "povm", Apparatus: "apparatus",
                Coupling: "coupling"}[type(self.measurement)]

    def povm(self) -> Povm:
        m = self.measurement
        if isinstance(m, ProjectiveBasis):
            return basis_to_povm(m)
        if isinstance(m, Povm):
            return m
        if isinstance(m, Coupling):
            return induced_povm(m.apparatus())
        return induced_povm(m)

    def basis(self) -> ProjectiveBasis:
        """The orthonormal basis of a projective measurement, else :class:`DomainError`."""
        if isinstance(self.measurement, ProjectiveBasis):
            return self.measurement
        return povm_as_basis(self.povm())


# --- decoding -------------------------------------------------------------

def _fail(path: str, msg: str):
    raise ParseError(f"{path}: {msg}")


def _get(obj: dict, key: str, path: str, required: bool = True):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    if key not in obj:
        if required:
            _fail(f"{path}.{key}" if path else key, "missing field")
        return None
    return obj[key]


def _real(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        _fail(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        _fail(path, "number is not finite")
    return float(x)


def _complex(x, path: str) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            _fail(path, "complex number must be a [re, im] pair")
        return complex(_real(x[0], path + "[0]"), _real(x[1], path + "[1]"))
    return complex(_real(x, path))


def _vector(x, path: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x:
        _fail(path, "expected a non-empty array of complex numbers")
    if dim is not None and len(x) != dim:
        _fail(path, f"expected {dim} entries, got {len(x)}")
    return np.array([_complex(v, f"{path}[{i}]") for i, v in enumerate(x)], dtype=complex)


def _matrix(x, path: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x:
        _fail(path, "expected a non-empty array of rows")
    n = len(x) if dim is None else dim
    if len(x) != n:
        _fail(path, f"expected {n} rows, got {len(x)}")
    return np.array([_vector(row, f"{path}[{i}]", n) for i, row in enumerate(x)])


def _labels(obj: dict, path: str) -> list[str] | None:
    labels = _get(obj, "labels", path, required=False)
    if labels is None:
        return None
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        _fail(path + ".labels", "expected an array of strings")
    return labels


def _validated(path: str, build, *args, **kwargs):
    try:
        return build(*args, **kwargs)
    except ParseError:
        raise
    except QMeterError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _ket(x, path: str, dim: int, tol: float) -> Ket:
    return _validated(path, Ket, _vector(x, path, dim), tol=tol)


def _basis(obj, path: str, dim: int, tol: float) -> ProjectiveBasis:
    vecs = _get(obj, "vectors", path)
    if not isinstance(vecs, list) or len(vecs) != dim:
        _fail(path + ".vectors", f"expected {dim} vectors")
    kets = [_ket(v, f"{path}.vectors[{i}]", dim, tol) for i, v in enumerate(vecs)]
    return _validated(path, ProjectiveBasis, kets, _labels(obj, path))


def _measurement(obj, dim: int, observable: Observable, tol: float) -> Measurement:
    path = "measurement"
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    kinds = [k for k in ("basis", "povm", "apparatus", "coupling") if k in obj]
    if len(kinds) != 1 or len(obj) != 1:
        _fail(path, "must contain exactly one of basis, povm, apparatus, coupling")
    kind = kinds[0]
    body = obj[kind]
    path = f"{path}.{kind}"
    if kind == "basis":
        return _basis(body, path, dim, tol)
    if kind == "povm":
        elems = _get(body, "elements", path)
        if not isinstance(elems, list) or not elems:
            _fail(path + ".elements", "expected a non-empty array of matrices")
        mats = [_matrix(e, f"{path}.elements[{i}]", dim) for i, e in enumerate(elems)]
        return _validated(path, validate_povm, mats, _labels(body, path))
    if kind == "apparatus":
        md = _get(body, "meter_dim", path)
        if isinstance(md, bool) or not isinstance(md, int) or md < 1:
            _fail(path + ".meter_dim", "expected a positive integer")
        init = _ket(_get(body, "meter_init", path), path + ".meter_init", md, tol)
        U = _matrix(_get(body, "unitary", path), path + ".unitary", dim * md)
        readout = _basis(_get(body, "readout", path), path + ".readout", md, tol)
        return _validated(path, Apparatus, dim, md, init, U, readout)
    phi = _real(_get(body, "phi", path), path + ".phi")
    raw_obs = _get(body, "observable", path, required=False)
    obs = observable if raw_obs is None else _validated(
        path + ".observable", Observable, _matrix(raw_obs, path + ".observable", dim))
    raw_readout = _get(body, "readout", path, required=False)
    readout = z_basis() if raw_readout is None else _basis(raw_readout, path + ".readout", 2, tol)
    raw_post = _get(body, "postselect", path, required=False)
    post = (ProjectiveBasis.computational(dim) if raw_post is None
            else _basis(raw_post, path + ".postselect", dim, tol))
    return Coupling(CouplingFamily(obs, phi), readout, post)


def from_dict(doc: Any, norm_tol: float = NORM_TOL) -> Scenario:
    if not isinstance(doc, dict):
        _fail("document", "expected a JSON object")
    version = _get(doc, "version", "")
    if version != SCHEMA_VERSION:
        _fail("version", f"unsupported schema version {version!r}")
    dim = _get(doc, "dim", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        _fail("dim", "expected a positive integer")
    state = _ket(_get(doc, "state", ""), "state", dim, norm_tol)
    observable = _validated("observable", Observable, _matrix(_get(doc, "observable", ""), "observable", dim))
    measurement = _measurement(_get(doc, "measurement", ""), dim, observable, norm_tol)
    scenario = Scenario(dim, state, observable, measurement)
    raw_assign = _get(doc, "assignment", "", required=False)
    assign = None
    if raw_assign is not None:
        if not isinstance(raw_assign, dict):
            _fail("assignment", "expected an object mapping labels to numbers or null")
        assign = ValueAssignment.from_mapping(
            {k: None if v is None else _real(v, f"assignment.{k}") for k, v in raw_assign.items()})
        labels = _validated("measurement", scenario.povm).labels
        _validated("assignment", lambda: assign.check_covers(labels))
    raw_b = _get(doc, "b_psi", "", required=False)
    b_psi = 0.0 if raw_b is None else _real(raw_b, "b_psi")
    return Scenario(dim, state, observable, measurement, assign, b_psi)


def parse_scenario(text: str, norm_tol: float = NORM_TOL) -> Scenario:
    """Parse and validate a scenario document.

    Raises
    ------
    ParseError
        Malformed JSON or schema violations (exit code 2).
    ValidationError
        A numerical invariant fails; the message starts with the field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return from_dict(doc, norm_tol)


# --- encoding -------------------------------------------------------------

def encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v)]


def encode_matrix(m) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(m)]


def _encode_basis(b: ProjectiveBasis) -> dict:
    return {"labels": list(b.labels), "vectors": [encode_vector(v.amps) for v in b.vectors]}


def to_dict(sc: Scenario) -> dict:
    m = sc.measurement
    if isinstance(m, ProjectiveBasis):
        meas = {"basis": _encode_basis(m)}
    elif isinstance(m, Povm):
        meas = {"povm": {"labels": m.labels, "elements": [encode_matrix(e.matrix) for e in m]}}
    elif isinstance(m, Apparatus):
        meas = {"apparatus": {"meter_dim": m.meter_dim, "meter_init": encode_vector(m.meter_init.amps),
                              "unitary": encode_matrix(m.joint_unitary),
                              "readout": _encode_basis(m.readout)}}
    else:
        meas = {"coupling": {"phi": m.family.phi, "observable": encode_matrix(m.family.observable.matrix),
                             "readout": _encode_basis(m.readout),
                             "postselect": _encode_basis(m.postselect)}}
    doc = {
        "version": SCHEMA_VERSION,
        "dim": sc.dim,
        "state": encode_vector(sc.state.amps),
        "observable": encode_matrix(sc.observable.matrix),
        "measurement": meas,
    }
    if sc.assignment is not None:
        doc["assignment"] = sc.assignment.as_dict()
    doc["b_psi"] = sc.b_psi
    return doc


def serialize(sc: Scenario) -> str:
    return json.dumps(to_dict(sc), indent=2) + "\n"

