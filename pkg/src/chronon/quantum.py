"""Density states, POVMs and Born-rule statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import opalg
from .errors import (
    DimensionError,
    EffectOutOfRange,
    NotComplete,
    NotHermitianError,
    NotNormalized,
    NotPositive,
    NotUnitTrace,
)

ATOL = opalg.ATOL_EXACT


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityState:
    """A validated density matrix. Build it with :func:`validate_state` or a helper below."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True, eq=False)
class Povm:
    outcomes: tuple[int, ...]
    effects: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(int(o) for o in self.outcomes))
        object.__setattr__(self, "effects", tuple(_frozen(e) for e in self.effects))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.effects[self.outcomes.index(k)]

    def stacked(self) -> np.ndarray:
        """Effects as one ``(n_outcomes, dim, dim)`` array."""
        return np.stack(self.effects)


def validate_state(rho) -> DensityState:
    """Check Hermiticity, unit trace and positivity (all at 1e-10)."""
    rho = opalg.as_matrix(rho, "rho")
    if opalg.hermiticity_defect(rho) >= ATOL:
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) >= ATOL:
        raise NotUnitTrace(f"trace is {tr:.12g}, expected 1")
    lowest = np.linalg.eigvalsh(0.5 * (rho + opalg.dagger(rho)))[0]
    if lowest < -ATOL:
        raise NotPositive(f"smallest eigenvalue {lowest:.3e} is negative")
    return DensityState(rho)


def validate_povm(effects: Sequence, outcomes: Sequence[int] | None = None) -> Povm:
    """Validate a family of effects and wrap it as a :class:`Povm`.

    Outcome labels default to ``0, 1, ..., len(effects) - 1``.
    """
    if len(effects) == 0:
        raise NotComplete("a POVM needs at least one effect")
    mats = [opalg.as_matrix(e, "effect") for e in effects]
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise DimensionError("effects have different dimensions")
    if outcomes is None:
        outcomes = range(len(mats))
    outcomes = tuple(int(o) for o in outcomes)
    if len(outcomes) != len(mats) or len(set(outcomes)) != len(outcomes):
        raise DimensionError("outcome labels must be distinct and match the effects one to one")
    for label, m in zip(outcomes, mats):
        if opalg.hermiticity_defect(m) >= ATOL:
            raise EffectOutOfRange(f"effect {label} is not Hermitian")
        w = np.linalg.eigvalsh(0.5 * (m + opalg.dagger(m)))
        if w[0] < -ATOL or w[-1] > 1 + ATOL:
            raise EffectOutOfRange(f"effect {label} has spectrum [{w[0]:.3g}, {w[-1]:.3g}]")
    defect = opalg.frobenius(sum(mats) - np.eye(dim))
    if defect >= ATOL:
        raise NotComplete(f"effects sum to identity only within {defect:.3e}")
    return Povm(outcomes, tuple(mats))


def probabilities(rho: DensityState, m: Povm) -> np.ndarray:
    """Born-rule outcome probabilities ``tr[rho E_k]`` in the POVM's outcome order."""
    if rho.dim != m.dim:
        raise DimensionError(f"state dim {rho.dim} != POVM dim {m.dim}")
    # tr[rho E] = sum_ij rho_ij E_ji
    p = np.einsum("ij,kji->k", rho.matrix, m.stacked())
    return np.real(p)


def product_state(parts: Sequence[DensityState]) -> DensityState:
    """Tensor product of states in the given factor order (S, C, R by convention)."""
    if not parts:
        raise DimensionError("product_state needs at least one part")
    # positivity is inherited from the factors; skip the costly re-diagonalisation
    return DensityState(opalg.kron_all([p.matrix for p in parts]))


def pure_state(vector) -> DensityState:
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) >= ATOL:
        raise NotNormalized(f"state vector has norm {norm:.12g}")
    return DensityState(np.outer(v, v.conj()))


def basis_vector(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[i % dim] = 1.0
    return v


def basis_state(dim: int, i: int) -> DensityState:
    return pure_state(basis_vector(dim, i))


def maximally_mixed(dim: int) -> DensityState:
    return DensityState(np.eye(dim, dtype=np.complex128) / dim)


def random_pure_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityState:
    """Random mixed state ``G G^dagger / tr`` from a ``dim x rank`` Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ opalg.dagger(g)
    return validate_state(rho / np.trace(rho))


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int) -> Povm:
    """Random POVM: positive operators ``G_k`` normalised by ``S^{-1/2} G_k S^{-1/2}``."""
    gs = []
    for _ in range(n_outcomes):
        x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        gs.append(x @ opalg.dagger(x))
    s = sum(gs)
    w, v = np.linalg.eigh(s)
    s_inv_half = (v / np.sqrt(w)) @ opalg.dagger(v)
    effects = [s_inv_half @ g @ s_inv_half for g in gs]
    effects = [0.5 * (e + opalg.dagger(e)) for e in effects]
    # absorb the rounding residue into the last effect so completeness is exact
    effects[-1] = np.eye(dim) - sum(effects[:-1])
    return validate_povm(effects)


def sharp_basis_povm(dim: int) -> Povm:
    return validate_povm([np.outer(basis_vector(dim, i), basis_vector(dim, i)) for i in range(dim)])
