"""Seeded random states, observables and measurements for property checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import Ket, Observable
from .measurement import Povm, ProjectiveBasis, basis_to_povm, validate_povm


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_ket(r: np.random.Generator, dim: int, real: bool = False) -> Ket:
    v = r.normal(size=dim)
    if not real:
        v = v + 1j * r.normal(size=dim)
    return Ket.normalized(v)


def random_hermitian(r: np.random.Generator, dim: int, real: bool = False) -> Observable:
    X = r.normal(size=(dim, dim))
    if not real:
        X = X + 1j * r.normal(size=(dim, dim))
    return Observable((X + X.conj().T) / 2)


def random_unitary(r: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase fix of Mezzadri."""
    Z = (r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_orthogonal(r: np.random.Generator, dim: int) -> np.ndarray:
    Q, R = np.linalg.qr(r.normal(size=(dim, dim)))
    return Q * np.sign(np.diag(R))


def random_basis(r: np.random.Generator, dim: int, real: bool = False) -> ProjectiveBasis:
    U = random_orthogonal(r, dim) if real else random_unitary(r, dim)
    return ProjectiveBasis.from_columns(U)


def random_povm(r: np.random.Generator, dim: int, n_outcomes: int = 3) -> Povm:
    """Generic full-rank POVM: ``E_m = S^-1/2 G_m S^-1/2`` with ``S = sum_m G_m``."""
    gs = []
    for _ in range(n_outcomes):
        X = r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))
        gs.append(X @ X.conj().T)
    w, V = np.linalg.eigh(sum(gs))
    s_inv_half = (V / np.sqrt(w)) @ V.conj().T
    return validate_povm([s_inv_half @ g @ s_inv_half for g in gs])


@dataclass(frozen=True, eq=False)
class RandomScenario:
    psi: Ket
    obs: Observable
    povm: Povm
    basis: ProjectiveBasis | None


def random_scenario(seed: int, dim: int | None = None, kind: str = "projective",
                    real: bool = False) -> RandomScenario:
    """One seeded scenario.

    ``kind`` is ``"projective"`` (random orthonormal basis) or ``"povm"``
    (three-outcome generic POVM). With ``real=True`` the observable matrix and
    state coefficients are real in the measurement basis, while the basis
    itself is a random unitary frame.
    """
    r = rng(seed)
    if dim is None:
        dim = int(r.integers(2, 6))
    if kind == "povm":
        return RandomScenario(random_ket(r, dim), random_hermitian(r, dim), random_povm(r, dim), None)
    if kind != "projective":
        raise ValueError(f"unknown scenario kind {kind!r}")
    basis = random_basis(r, dim)
    if real:
        V = basis.matrix()
        obs = Observable(V @ random_hermitian(r, dim, real=True).matrix @ V.conj().T)
        psi = Ket(V @ random_ket(r, dim, real=True).amps)
    else:
        obs, psi = random_hermitian(r, dim), random_ket(r, dim)
    return RandomScenario(psi, obs, basis_to_povm(basis), basis)


def scenario_suite(n: int = 100, start: int = 0) -> list[RandomScenario]:
    """Mixed suite: alternating projective / POVM scenarios, dimensions 2-5."""
    return [random_scenario(seed, kind="povm" if seed % 3 == 2 else "projective")
            for seed in range(start, start + n)]


@dataclass(frozen=True, eq=False)
class PostselectedQubit:
    psi: Ket
    obs: Observable
    postselect: Ket
    probability: float


def postselected_qubit(seed: int, min_probability: float = 0.05) -> PostselectedQubit:
    """Random qubit state, observable and post-selection with ``|<f|psi>|**2 > min_probability``.

    Draws are repeated from the same seeded stream until the overlap condition holds.
    """
    r = rng(seed)
    while True:
        obs, psi, post = random_hermitian(r, 2), random_ket(r, 2), random_ket(r, 2)
        p = abs(post.inner(psi)) ** 2
        if p > min_probability:
            return PostselectedQubit(psi, obs, post, p)
