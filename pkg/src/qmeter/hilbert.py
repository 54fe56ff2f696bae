"""Finite-dimensional state vectors, observables and their eigensystems.

Every object here is an immutable value: the wrapped numpy arrays are
copied on construction and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, ValidationError

NORM_TOL = 1e-6
HERMITIAN_TOL = 1e-10
DEGENERACY_TOL = 1e-9
IMAG_TOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite entries")


class Ket:
    """Normalized complex amplitude vector.

    States whose norm deviates from one by more than ``tol`` are rejected;
    use :meth:`normalized` to rescale an arbitrary nonzero vector.
    """

    __slots__ = ("amps",)

    def __init__(self, amps, tol: float = NORM_TOL):
        arr = np.asarray(amps, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ValidationError("state must be a non-empty vector")
        _check_finite(arr, "state")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > tol:
            raise ValidationError(f"norm {norm:.6f} outside tolerance")
        # leave exactly-normalized input bit-identical so serialization round-trips
        if abs(norm - 1.0) > 1e-12:
            arr = arr / norm
        object.__setattr__(self, "amps", _frozen(arr))

    def __setattr__(self, name, value):
        raise AttributeError("Ket is immutable")

    @classmethod
    def normalized(cls, amps) -> Ket:
        arr = np.asarray(amps, dtype=complex)
        _check_finite(arr, "state")
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(arr / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> Ket:
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def inner(self, other: Ket) -> complex:
        """Return ``<self|other>``."""
        _match(self.dim, other.dim)
        return complex(np.vdot(self.amps, other.amps))

    def projector(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def __eq__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        return np.array_equal(self.amps, other.amps)

    def __hash__(self):
        return hash(self.amps.tobytes())

    def __repr__(self):
        return f"Ket({np.array2string(self.amps, precision=6)})"


class Observable:
    """Hermitian matrix. Construct through :func:`validate_hermitian` or directly."""

    def __init__(self, matrix, tol: float = HERMITIAN_TOL):
        arr = np.asarray(matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValidationError("matrix must have dimension >= 1")
        _check_finite(arr, "matrix")
        asym = hermitian_asymmetry(arr)
        scale = float(np.max(np.abs(arr)))
        if asym > tol * scale:
            raise ValidationError(f"not Hermitian: max asymmetry {asym:.6g}")
        object.__setattr__(self, "matrix", _frozen((arr + arr.conj().T) / 2))

    def __setattr__(self, name, value):
        raise AttributeError("Observable is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self) -> Eigensystem:
        return eigensystem(self)

    def __add__(self, other: Observable) -> Observable:
        return Observable(self.matrix + other.matrix)

    def __sub__(self, other: Observable) -> Observable:
        return Observable(self.matrix - other.matrix)

    def __matmul__(self, other):
        if isinstance(other, Ket):
            return self.matrix @ other.amps
        return self.matrix @ np.asarray(other)

    def __eq__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __repr__(self):
        return f"Observable(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Ascending eigenvalues, orthonormal eigenvectors and degeneracy clusters."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[Ket, ...]
    clusters: tuple[tuple[int, ...], ...]

    def cluster_values(self) -> list[float]:
        return [float(np.mean(self.eigenvalues[list(c)])) for c in self.clusters]

    def projector(self, cluster: int) -> np.ndarray:
        """Spectral projector onto the eigenspace of one degeneracy cluster."""
        return sum(self.eigenvectors[k].projector() for k in self.clusters[cluster])

    def reconstruct(self) -> np.ndarray:
        return sum(lam * v.projector() for lam, v in zip(self.eigenvalues, self.eigenvectors))


def hermitian_asymmetry(matrix) -> float:
    arr = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(arr - arr.conj().T)))


def validate_hermitian(raw, tol: float = HERMITIAN_TOL) -> Observable:
    """Check a raw square matrix and wrap it as an :class:`Observable`.

    Raises
    ------
    ValidationError
        If the matrix is not square or its largest entry of ``M - M^dagger``
        exceeds ``tol`` times the largest entry magnitude.
    """
    return Observable(raw, tol=tol)


def _match(d1: int, d2: int) -> None:
    if d1 != d2:
        raise DimensionMismatch(f"dimension mismatch: {d1} vs {d2}")


def real_part(z: complex, what: str = "value", tol: float = IMAG_TOL) -> float:
    """Drop an imaginary residue after checking it is numerical noise."""
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        raise ValidationError(f"{what} has imaginary residue {z.imag:.3g}")
    return float(z.real)


def expectation(obs: Observable, psi: Ket) -> float:
    """Return ``<psi|obs|psi>`` as a real number."""
    _match(obs.dim, psi.dim)
    z = complex(np.vdot(psi.amps, obs.matrix @ psi.amps))
    return real_part(z, "expectation")


def eigensystem(obs: Observable) -> Eigensystem:
    """Diagonalize ``obs`` with a deterministic ordering and phase convention.

    Eigenvalues ascend; each eigenvector is rotated so that its
    largest-magnitude component (first one on ties) is real and positive.
    Neighbouring eigenvalues closer than ``DEGENERACY_TOL`` share a cluster.
    """
    w, V = np.linalg.eigh(obs.matrix)
    vecs = []
    for k in range(V.shape[1]):
        v = V[:, k]
        mags = np.abs(v)
        j = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
        v = v * (abs(v[j]) / v[j])
        vecs.append(Ket(v))
    clusters: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] < DEGENERACY_TOL:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    w = np.array(w, dtype=float)
    w.setflags(write=False)
    return Eigensystem(w, tuple(vecs), tuple(tuple(c) for c in clusters))


# Common single-qubit operators and states.
SIGMA_X = Observable([[0, 1], [1, 0]])
SIGMA_Y = Observable([[0, -1j], [1j, 0]])
SIGMA_Z = Observable([[1, 0], [0, -1]])


def identity(dim: int) -> Observable:
    return Observable(np.eye(dim))
