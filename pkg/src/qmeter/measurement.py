"""POVMs, projective bases and outcome probabilities ``P(m) = <psi|E_m|psi>``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .hilbert import HERMITIAN_TOL, Ket, _match, hermitian_asymmetry

POSITIVITY_TOL = 1e-9
COMPLETENESS_TOL = 1e-9
ORTHONORMAL_TOL = 1e-9
PROB_TOL = 1e-9


def default_labels(n: int) -> list[str]:
    return [f"m{k}" for k in range(n)]


@dataclass(frozen=True, eq=False)
class PovmElement:
    label: str
    matrix: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, PovmElement):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered collection of positive operators summing to the identity.

    Build instances with :func:`validate_povm` (or :func:`basis_to_povm`);
    the plain constructor does not check anything.
    """

    elements: tuple[PovmElement, ...]
    projective: bool = False

    @property
    def dim(self) -> int:
        return self.elements[0].matrix.shape[0]

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.elements]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, label: str) -> PovmElement:
        for e in self.elements:
            if e.label == label:
                return e
        raise KeyError(label)

    def __eq__(self, other):
        if not isinstance(other, Povm):
            return NotImplemented
        return self.elements == other.elements


@dataclass(frozen=True, eq=False, init=False)
class ProjectiveBasis:
    """Labelled orthonormal basis; the measurement ``E_m = |m><m|``."""

    vectors: tuple[Ket, ...]
    labels: tuple[str, ...]

    def __init__(self, vectors: Sequence[Ket], labels: Sequence[str] | None = None,
                 tol: float = ORTHONORMAL_TOL):
        vectors = tuple(v if isinstance(v, Ket) else Ket(v) for v in vectors)
        if not vectors:
            raise ValidationError("basis must contain at least one vector")
        dim = vectors[0].dim
        if len(vectors) != dim or any(v.dim != dim for v in vectors):
            raise ValidationError(f"basis needs {dim} vectors of dimension {dim}")
        labels = tuple(default_labels(dim) if labels is None else labels)
        _check_labels(labels, dim)
        V = np.column_stack([v.amps for v in vectors])
        dev = float(np.max(np.abs(V.conj().T @ V - np.eye(dim))))
        if dev > tol:
            raise ValidationError(f"basis not orthonormal: max deviation {dev:.6g}")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.vectors[0].dim

    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""
        return np.column_stack([v.amps for v in self.vectors])

    @classmethod
    def computational(cls, dim: int, labels: Sequence[str] | None = None) -> ProjectiveBasis:
        if labels is None:
            labels = [str(k) for k in range(dim)]
        return cls([Ket.basis(dim, k) for k in range(dim)], labels)

    @classmethod
    def from_columns(cls, U, labels: Sequence[str] | None = None) -> ProjectiveBasis:
        U = np.asarray(U, dtype=complex)
        return cls([Ket(U[:, k]) for k in range(U.shape[1])], labels)

    def __eq__(self, other):
        if not isinstance(other, ProjectiveBasis):
            return NotImplemented
        return self.labels == other.labels and self.vectors == other.vectors


def x_basis() -> ProjectiveBasis:
    s = 1 / np.sqrt(2)
    return ProjectiveBasis([Ket([s, s]), Ket([s, -s])], ["+", "-"])


def z_basis() -> ProjectiveBasis:
    return ProjectiveBasis.computational(2)


def _check_labels(labels: Sequence[str], n: int) -> None:
    if len(labels) != n:
        raise ValidationError(f"expected {n} labels, got {len(labels)}")
    if len(set(labels)) != n:
        raise ValidationError("outcome labels must be distinct")


def validate_povm(matrices: Sequence, labels: Sequence[str] | None = None,
                  positivity_tol: float = POSITIVITY_TOL,
                  completeness_tol: float = COMPLETENESS_TOL) -> Povm:
    """Check raw effect matrices and bundle them as a :class:`Povm`.

    The error message names the violated invariant: hermiticity, positivity
    (with the offending eigenvalue, elements numbered from 1) or completeness
    (with the largest entry of ``sum_m E_m - I``).
    """
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    if not mats:
        raise ValidationError("POVM needs at least one element")
    dim = mats[0].shape[0]
    labels = list(default_labels(len(mats)) if labels is None else labels)
    _check_labels(labels, len(mats))
    elements = []
    for k, (lab, m) in enumerate(zip(labels, mats), start=1):
        if m.shape != (dim, dim):
            raise ValidationError(f"element {k}: shape {m.shape}, expected {(dim, dim)}")
        if not np.all(np.isfinite(m)):
            raise ValidationError(f"element {k}: non-finite entries")
        asym = hermitian_asymmetry(m)
        if asym > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
            raise ValidationError(f"element {k}: not Hermitian, max asymmetry {asym:.6g}")
        m = (m + m.conj().T) / 2
        lam = float(np.linalg.eigvalsh(m)[0])
        if lam < -positivity_tol:
            raise ValidationError(f"element {k}: negative eigenvalue {lam:.6g}")
        m.setflags(write=False)
        elements.append(PovmElement(lab, m))
    dev = float(np.max(np.abs(sum(e.matrix for e in elements) - np.eye(dim))))
    if dev > completeness_tol:
        raise ValidationError(f"completeness violated: max deviation {dev:.6g}")
    return Povm(tuple(elements))


def basis_to_povm(basis: ProjectiveBasis) -> Povm:
    """Rank-one projectors ``|m><m|`` of an orthonormal basis, same labels."""
    elements = []
    for lab, v in zip(basis.labels, basis.vectors):
        p = v.projector()
        p.setflags(write=False)
        elements.append(PovmElement(lab, p))
    return Povm(tuple(elements), projective=True)


def outcome_probabilities(povm: Povm, psi: Ket, tol: float = PROB_TOL) -> list[tuple[str, float]]:
    """Return ``[(label, <psi|E_m|psi>), ...]`` in element order.

    Values within ``tol`` outside [0, 1] are clamped; anything further out
    raises, since it means the POVM or the state is broken.
    """
    _match(povm.dim, psi.dim)
    out = []
    for e in povm:
        p = float(np.vdot(psi.amps, e.matrix @ psi.amps).real)
        if p < -tol or p > 1 + tol:
            raise ValidationError(f"probability of {e.label!r} is {p:.6g}, outside [0, 1]")
        out.append((e.label, min(max(p, 0.0), 1.0)))
    total = sum(p for _, p in out)
    if abs(total - 1) > tol:
        raise ValidationError(f"probabilities sum to {total:.12g}")
    return out


def povm_as_basis(povm: Povm, tol: float = ORTHONORMAL_TOL) -> ProjectiveBasis:
    """Recover the basis of a rank-one projective POVM.

    Raises
    ------
    DomainError
        If some element is not a rank-one projector (or there are not ``dim`` of them).
    """
    if len(povm) != povm.dim:
        raise DomainError(f"measurement is not projective: {len(povm)} outcomes in dimension {povm.dim}")
    vectors = []
    for e in povm:
        w, V = np.linalg.eigh(e.matrix)
        if abs(w[-1] - 1) > tol or np.max(np.abs(w[:-1]), initial=0.0) > tol:
            raise DomainError(f"measurement is not projective: element {e.label!r} is not a rank-one projector")
        vectors.append(Ket(V[:, -1]))
    try:
        return ProjectiveBasis(vectors, povm.labels, tol=tol)
    except ValidationError as exc:
        raise DomainError(f"measurement is not projective: {exc}") from exc
