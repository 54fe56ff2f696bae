"""Joint quasiprobabilities of eigenvalues and outcomes, and their negativity.

Entries are ``q(a, m) = Re <psi|E_m P_a|psi>`` with ``P_a`` the spectral
projector of a (possibly degenerate) eigenvalue cluster, so the table does
not depend on how eigenvectors are chosen inside a degenerate subspace.

Only this particular (real Kirkwood-Dirac) representation is examined. A
negative entry shows that it, not every conceivable joint distribution,
fails to be a probability table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .error_analysis import ZERO_PROB, ValueAssignment
from .hilbert import Ket, Observable, _match
from .measurement import Povm

CLASSICAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class JointQuasiprobTable:
    """Rows are eigenvalue clusters, columns are outcomes."""

    values: tuple[float, ...]
    ranks: tuple[int, ...]
    labels: tuple[str, ...]
    complex_entries: np.ndarray

    @property
    def entries(self) -> np.ndarray:
        return self.complex_entries.real

    def q(self, value: float, label: str, tol: float = 1e-9) -> float:
        rows = [i for i, v in enumerate(self.values) if abs(v - value) < tol]
        if not rows:
            raise KeyError(value)
        return float(self.entries[rows[0], self.labels.index(label)])

    def column_marginals(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def row_marginals(self) -> np.ndarray:
        return self.entries.sum(axis=1)


@dataclass(frozen=True)
class Negativity:
    min_entry: float
    negative_mass: float
    tol: float = CLASSICAL_TOL

    @property
    def classical(self) -> bool:
        return self.min_entry >= -self.tol


def joint_quasiprob(psi: Ket, povm: Povm, obs: Observable) -> JointQuasiprobTable:
    _match(povm.dim, psi.dim)
    _match(obs.dim, psi.dim)
    es = obs.eigensystem
    projected = [es.projector(k) @ psi.amps for k in range(len(es.clusters))]
    table = np.array([[np.vdot(psi.amps, e.matrix @ pa) for e in povm] for pa in projected])
    table.setflags(write=False)
    return JointQuasiprobTable(
        values=tuple(es.cluster_values()),
        ranks=tuple(len(c) for c in es.clusters),
        labels=tuple(povm.labels),
        complex_entries=table,
    )


def negativity(table: JointQuasiprobTable, tol: float = CLASSICAL_TOL) -> Negativity:
    q = table.entries
    return Negativity(float(q.min()), float(np.clip(-q, 0, None).sum()), tol)


def estimate_from_quasiprob(table: JointQuasiprobTable) -> ValueAssignment:
    """Conditional mean ``sum_a a q(a, m) / P(m)`` of each column."""
    q = table.entries
    a = np.array(table.values)
    values = []
    for j, label in enumerate(table.labels):
        p = q[:, j].sum()
        values.append(None if p < ZERO_PROB else float(a @ q[:, j] / p))
    return ValueAssignment.from_values(table.labels, values)
