"""Ozawa's squared measurement error and the error-minimizing value assignment.

For an outcome ``m`` with assigned value ``x`` the error contribution is

    eps2_m(x) = <psi| (x - A) E_m (x - A) |psi>
              = P(m) x**2 - 2 x Re<psi|E_m A|psi> + <psi|A E_m A|psi>,

a quadratic in ``x`` minimized by the real part of the weak value
``Re<psi|E_m A|psi> / P(m)``. The total error is the sum over outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .errors import ValidationError
from .hilbert import Ket, Observable, _match
from .measurement import Povm

ZERO_PROB = 1e-12
NEG_ERROR_TOL = 1e-10
BRUTE_WIDTH = 1e-8


@dataclass(frozen=True)
class ValueAssignment:
    """Outcome label -> assigned real value, ``None`` marking an undefined value."""

    items: tuple[tuple[str, float | None], ...]

    @classmethod
    def from_mapping(cls, values: Mapping[str, float | None]) -> ValueAssignment:
        return cls(tuple((str(k), None if v is None else float(v)) for k, v in values.items()))

    @classmethod
    def from_values(cls, labels, values) -> ValueAssignment:
        return cls(tuple((str(k), None if v is None else float(v)) for k, v in zip(labels, values)))

    def __getitem__(self, label: str) -> float | None:
        for k, v in self.items:
            if k == label:
                return v
        raise KeyError(label)

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self.items)

    def __len__(self):
        return len(self.items)

    @property
    def labels(self) -> list[str]:
        return [k for k, _ in self.items]

    def values(self) -> list[float | None]:
        return [v for _, v in self.items]

    def is_defined(self, label: str) -> bool:
        return self[label] is not None

    def as_dict(self) -> dict[str, float | None]:
        return dict(self.items)

    def check_covers(self, labels) -> None:
        mine = self.labels
        if len(set(mine)) != len(mine):
            raise ValidationError("assignment: duplicate outcome labels")
        if set(mine) != set(labels):
            missing = sorted(set(labels) - set(mine))
            extra = sorted(set(mine) - set(labels))
            raise ValidationError(f"assignment: labels do not match measurement "
                                  f"(missing {missing}, unexpected {extra})")


@dataclass(frozen=True)
class OutcomeError:
    label: str
    probability: float
    value: float | None
    error: float
    optimal: float | None
    min_error: float

    @property
    def undefined(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class ErrorReport:
    outcomes: tuple[OutcomeError, ...]

    @property
    def total(self) -> float:
        return sum(o.error for o in self.outcomes)

    @property
    def min_total(self) -> float:
        return sum(o.min_error for o in self.outcomes)

    def __getitem__(self, label: str) -> OutcomeError:
        for o in self.outcomes:
            if o.label == label:
                return o
        raise KeyError(label)


def _clamp_error(e: float, label: str, scale: float = 1.0) -> float:
    # both evaluation routes cancel terms of size ``scale``; tolerate their rounding
    if e < -NEG_ERROR_TOL * max(1.0, scale):
        raise ValidationError(f"negative squared error {e:.3g} for outcome {label!r}")
    return max(e, 0.0)


def outcome_error(psi: Ket, effect: np.ndarray, obs: Observable, value: float) -> float:
    """Evaluate ``<psi|(value - A) E (value - A)|psi>`` by direct matrix products."""
    v = value * psi.amps - obs.matrix @ psi.amps
    return float(np.vdot(v, effect @ v).real)


def _closed_form(psi: Ket, effect: np.ndarray, obs: Observable) -> tuple[float, float | None, float]:
    """Return ``(P(m), A_opt(m) or None, minimized error)`` for one effect."""
    a_psi = obs.matrix @ psi.amps
    p = float(np.vdot(psi.amps, effect @ psi.amps).real)
    aea = float(np.vdot(a_psi, effect @ a_psi).real)
    if p < ZERO_PROB:
        return p, None, aea
    opt = float(np.vdot(psi.amps, effect @ a_psi).real) / p
    return p, opt, aea - p * opt * opt


def _check(psi: Ket, povm: Povm, obs: Observable) -> None:
    _match(povm.dim, psi.dim)
    _match(obs.dim, psi.dim)


def ozawa_error(psi: Ket, povm: Povm, obs: Observable, assign: ValueAssignment) -> ErrorReport:
    """Per-outcome and total squared error of the value assignment ``assign``.

    An undefined value is accepted only for outcomes with probability below
    ``ZERO_PROB``; such an outcome is evaluated with value 0, which leaves the
    residual ``<psi|A E_m A|psi>`` that no choice of value can remove.
    """
    _check(psi, povm, obs)
    assign.check_covers(povm.labels)
    rows = []
    for e in povm:
        p, opt, emin = _closed_form(psi, e.matrix, obs)
        value = assign[e.label]
        if value is None and p >= ZERO_PROB:
            raise ValidationError(f"assignment: value for outcome {e.label!r} is undefined "
                                  f"but its probability is {p:.6g}")
        x = 0.0 if value is None else value
        d = x * psi.amps - obs.matrix @ psi.amps
        err = _clamp_error(outcome_error(psi, e.matrix, obs, x), e.label, float(np.vdot(d, d).real))
        scale = emin if opt is None else p * opt * opt
        rows.append(OutcomeError(e.label, max(p, 0.0), value, err, opt, _clamp_error(emin, e.label, scale)))
    return ErrorReport(tuple(rows))


def optimal_assignment(psi: Ket, povm: Povm, obs: Observable) -> tuple[ValueAssignment, ErrorReport]:
    """The error-minimizing values ``Re<psi|E_m A|psi> / <psi|E_m|psi>``.

    Outcomes with probability below ``ZERO_PROB`` are left undefined.
    """
    _check(psi, povm, obs)
    values = [_closed_form(psi, e.matrix, obs)[1] for e in povm]
    assign = ValueAssignment.from_values(povm.labels, values)
    return assign, ozawa_error(psi, povm, obs, assign)


def _ternary_min(f, lo: float, hi: float, width: float) -> float:
    while hi - lo > width:
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1) < f(m2):
            hi = m2
        else:
            lo = m1
    return (lo + hi) / 2


def brute_force_assignment(psi: Ket, povm: Povm, obs: Observable,
                           width: float = BRUTE_WIDTH) -> ValueAssignment:
    """Minimize each outcome's error numerically, without the weak-value formula.

    Ternary search over ``[a_min - span, a_max + span]`` with
    ``span = a_max - a_min + 1``; each outcome is independent because the
    total error is separable in the assigned values.
    """
    _check(psi, povm, obs)
    w = np.linalg.eigvalsh(obs.matrix)
    span = w[-1] - w[0] + 1
    values = []
    for e in povm:
        p = float(np.vdot(psi.amps, e.matrix @ psi.amps).real)
        if p < ZERO_PROB:
            values.append(None)
            continue
        f = lambda x, m=e.matrix: outcome_error(psi, m, obs, x)  # noqa: E731
        values.append(_ternary_min(f, w[0] - span, w[-1] + span, width))
    return ValueAssignment.from_values(povm.labels, values)
