"""Zero-error certificates for projective measurements and the split ``A = B + M``.

With ``E_m = |m><m|`` the error of outcome ``m`` is ``|r_m|**2`` where
``r_m = <m|(x_m - A)|psi>``, so the assignment is error free exactly when
every residual vanishes. The operator ``M = sum_m (x_m - b)|m><m|`` then
satisfies ``(A - M)|psi> = b|psi>`` for any real offset ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .error_analysis import ValueAssignment
from .hilbert import Ket, Observable, _match
from .measurement import ProjectiveBasis

POSTSELECT_MIN = 1e-12
DETERMINISTIC_TOL = 1e-8
REAL_TOL = 1e-10


@dataclass(frozen=True)
class WeakValue:
    label: str
    value: complex
    postselect_probability: float


@dataclass(frozen=True)
class Certificate:
    residuals: tuple[tuple[str, complex], ...]
    tol: float = DETERMINISTIC_TOL

    @property
    def max_residual(self) -> float:
        return max(abs(r) for _, r in self.residuals)

    @property
    def deterministic(self) -> bool:
        return self.max_residual < self.tol

    @property
    def squared_sum(self) -> float:
        """Sum of ``|r_m|**2``; equals the total error of the assignment."""
        return float(sum(abs(r) ** 2 for _, r in self.residuals))


@dataclass(frozen=True, eq=False)
class Decomposition:
    M: Observable
    B: Observable
    b_psi: float
    eigen_residual: float


def weak_value(psi: Ket, m_vec: Ket, obs: Observable, label: str = "m") -> WeakValue:
    """``<m|A|psi> / <m|psi>`` together with the post-selection probability ``|<m|psi>|**2``."""
    _match(psi.dim, m_vec.dim)
    _match(obs.dim, psi.dim)
    overlap = m_vec.inner(psi)
    p = abs(overlap) ** 2
    if p < POSTSELECT_MIN:
        raise DomainError(f"post-selection on {label!r} has vanishing amplitude ({p:.3g})")
    num = complex(np.vdot(m_vec.amps, obs.matrix @ psi.amps))
    return WeakValue(label, num / overlap, p)


def weak_values(psi: Ket, basis: ProjectiveBasis, obs: Observable) -> list[WeakValue | None]:
    """Weak values for each basis outcome; ``None`` where the overlap vanishes."""
    out = []
    for lab, v in zip(basis.labels, basis.vectors):
        try:
            out.append(weak_value(psi, v, obs, lab))
        except DomainError:
            out.append(None)
    return out


def zero_error_residuals(psi: Ket, basis: ProjectiveBasis, obs: Observable,
                         assign: ValueAssignment, tol: float = DETERMINISTIC_TOL) -> Certificate:
    """Residuals ``<m|(x_m - A)|psi>`` and the deterministic verdict.

    Undefined values (zero-probability outcomes) enter as 0; the overlap
    ``<m|psi>`` is negligible there, so the residual is ``-<m|A|psi>``.
    """
    if not isinstance(basis, ProjectiveBasis):
        raise DomainError("zero-error certification needs a projective measurement")
    _match(psi.dim, basis.dim)
    _match(obs.dim, psi.dim)
    assign.check_covers(basis.labels)
    a_psi = obs.matrix @ psi.amps
    res = []
    for lab, v in zip(basis.labels, basis.vectors):
        x = assign[lab] or 0.0
        res.append((lab, complex(x * np.vdot(v.amps, psi.amps) - np.vdot(v.amps, a_psi))))
    return Certificate(tuple(res), tol)


def real_matrix_family_check(basis: ProjectiveBasis, obs: Observable, psi: Ket,
                             tol: float = REAL_TOL) -> bool:
    """True when ``A`` has real matrix elements and ``psi`` real coefficients in ``basis``.

    This is sufficient (not necessary) for all weak values to be real, hence
    for the optimal assignment to be error free.
    """
    _match(psi.dim, basis.dim)
    _match(obs.dim, psi.dim)
    V = basis.matrix()
    a_m = V.conj().T @ obs.matrix @ V
    psi_m = V.conj().T @ psi.amps
    return bool(np.all(np.abs(a_m.imag) < tol) and np.all(np.abs(psi_m.imag) < tol))


def decompose(obs: Observable, basis: ProjectiveBasis, assign: ValueAssignment,
              psi: Ket, b_psi: float = 0.0) -> Decomposition:
    """Build ``M = sum_m (x_m - b_psi)|m><m|`` and ``B = A - M``.

    ``eigen_residual`` is ``||(A - M)psi - b_psi psi||``; it vanishes exactly
    when every zero-error residual does.
    """
    _match(obs.dim, basis.dim)
    _match(psi.dim, basis.dim)
    assign.check_covers(basis.labels)
    undefined = [lab for lab in basis.labels if assign[lab] is None]
    if undefined:
        raise ValidationError(f"assignment: undefined values for {undefined}; decomposition needs all of them")
    V = basis.matrix()
    shifts = np.array([assign[lab] - b_psi for lab in basis.labels])
    M = Observable((V * shifts) @ V.conj().T)
    B = Observable(obs.matrix - M.matrix)
    r = B.matrix @ psi.amps - b_psi * psi.amps
    return Decomposition(M, B, float(b_psi), float(np.linalg.norm(r)))


def variance(obs: Observable, psi: Ket) -> float:
    mean = np.vdot(psi.amps, obs.matrix @ psi.amps).real
    d = obs.matrix @ psi.amps - mean * psi.amps
    return float(np.vdot(d, d).real)


def symmetrized_covariance(a: Observable, b: Observable, psi: Ket) -> float:
    """``1/2 <psi|{A - <A>, B - <B>}|psi>``."""
    da = a.matrix @ psi.amps - np.vdot(psi.amps, a.matrix @ psi.amps).real * psi.amps
    db = b.matrix @ psi.amps - np.vdot(psi.amps, b.matrix @ psi.amps).real * psi.amps
    return float(np.vdot(da, db).real)
