"""System-meter measurement models and the POVM they induce on the system.

Joint indices are system-major: ``joint = system_index * meter_dim + meter_index``,
i.e. the joint space is ``system (x) meter`` in ``np.kron`` order.

:class:`CouplingFamily` is an illustrative qubit-meter model, not a
description of any particular experiment: each eigenvalue ``a`` of the
observable rotates the meter by ``R_y(phi * a) = exp(-i phi a sigma_y / 2)``,
starting from ``|0>``. For weak coupling the sigma_x shift of the meter,
conditioned on a system post-selection, approaches ``phi * Re(weak value)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, DomainError, ValidationError
from .hilbert import SIGMA_X, Ket, Observable
from .measurement import Povm, ProjectiveBasis, validate_povm, z_basis

UNITARY_TOL = 1e-9
POSTSELECT_MIN = 1e-12


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class Apparatus:
    system_dim: int
    meter_dim: int
    meter_init: Ket
    joint_unitary: np.ndarray
    readout: ProjectiveBasis

    def __post_init__(self):
        U = np.array(self.joint_unitary, dtype=complex)
        n = self.system_dim * self.meter_dim
        if U.shape != (n, n):
            raise DimensionMismatch(f"joint unitary has shape {U.shape}, expected {(n, n)}")
        if self.meter_init.dim != self.meter_dim or self.readout.dim != self.meter_dim:
            raise DimensionMismatch("meter state and readout basis must live on the meter")
        dev = float(np.max(np.abs(U.conj().T @ U - np.eye(n))))
        if dev > UNITARY_TOL:
            raise ValidationError(f"joint matrix is not unitary: max deviation {dev:.6g}")
        U.setflags(write=False)
        object.__setattr__(self, "joint_unitary", U)

    def __eq__(self, other):
        if not isinstance(other, Apparatus):
            return NotImplemented
        return (self.system_dim == other.system_dim and self.meter_dim == other.meter_dim
                and self.meter_init == other.meter_init and self.readout == other.readout
                and np.array_equal(self.joint_unitary, other.joint_unitary))

    def evolve(self, psi: Ket) -> np.ndarray:
        """Joint state ``U (psi (x) meter_init)`` as a flat system-major vector."""
        if psi.dim != self.system_dim:
            raise DimensionMismatch(f"dimension mismatch: {psi.dim} vs {self.system_dim}")
        return self.joint_unitary @ np.kron(psi.amps, self.meter_init.amps)


def kraus_operators(app: Apparatus) -> list[tuple[str, np.ndarray]]:
    """``K_m = (I (x) <m|) U (I (x) |meter_init>)`` for every readout outcome."""
    s, d = app.system_dim, app.meter_dim
    # U4[i, a, j, b] = <i, a| U |j, b>
    U4 = app.joint_unitary.reshape(s, d, s, d)
    fed = U4 @ app.meter_init.amps  # contracts b
    return [(lab, np.einsum("a,iaj->ij", m.amps.conj(), fed))
            for lab, m in zip(app.readout.labels, app.readout.vectors)]


def induced_povm(app: Apparatus) -> Povm:
    """Effects ``E_m = K_m^dagger K_m`` on the system, labelled by readout outcome."""
    ks = kraus_operators(app)
    return validate_povm([k.conj().T @ k for _, k in ks], [lab for lab, _ in ks])


@dataclass(frozen=True, eq=False)
class CouplingFamily:
    """Spectral coupling ``U(phi) = sum_a P_a (x) R_y(phi a)`` to a qubit meter in ``|0>``."""

    observable: Observable
    phi: float

    def __eq__(self, other):
        if not isinstance(other, CouplingFamily):
            return NotImplemented
        return self.observable == other.observable and self.phi == other.phi

    def with_phi(self, phi: float) -> CouplingFamily:
        return replace(self, phi=float(phi))

    def unitary(self) -> np.ndarray:
        es = self.observable.eigensystem
        return sum(np.kron(es.projector(k), ry(self.phi * a))
                   for k, a in enumerate(es.cluster_values()))

    def apparatus(self, readout: ProjectiveBasis | None = None) -> Apparatus:
        return Apparatus(
            system_dim=self.observable.dim,
            meter_dim=2,
            meter_init=Ket.basis(2, 0),
            joint_unitary=self.unitary(),
            readout=z_basis() if readout is None else readout,
        )


def conditional_meter_shift(fam: CouplingFamily, psi: Ket, postselect: Ket,
                            meter_obs: Observable = SIGMA_X) -> float:
    """Exact meter expectation conditioned on post-selecting the system in ``postselect``.

    Raises
    ------
    DomainError
        If the joint post-selection probability is below ``POSTSELECT_MIN``.
    """
    if postselect.dim != psi.dim:
        raise DimensionMismatch(f"dimension mismatch: {postselect.dim} vs {psi.dim}")
    joint = fam.apparatus().evolve(psi).reshape(psi.dim, 2)
    meter = postselect.amps.conj() @ joint
    p = float(np.vdot(meter, meter).real)
    if p < POSTSELECT_MIN:
        raise DomainError(f"post-selection probability {p:.3g} too small to condition on")
    return float(np.vdot(meter, meter_obs.matrix @ meter).real) / p


def shift_sweep(fam: CouplingFamily, psi: Ket, postselect: Ket,
                phis: Iterable[float]) -> list[tuple[float, float]]:
    """``[(phi, shift(phi) / phi), ...]`` over a grid of nonzero coupling strengths."""
    out = []
    for phi in phis:
        if phi == 0:
            raise ValueError("coupling strength must be nonzero")
        out.append((float(phi), conditional_meter_shift(fam.with_phi(phi), psi, postselect) / phi))
    return out
