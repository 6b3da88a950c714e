"""Dense complex operator algebra.

Operators are plain ``numpy`` arrays of shape ``(dim, dim)`` and dtype
``complex128``. Units are chosen with hbar = 1, so times and energies are
dimensionless.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError

ATOL_EXACT = 1e-10
ATOL_TRACE = 1e-12


def as_matrix(x, name: str = "operator") -> np.ndarray:
    """Return ``x`` as a square complex128 array, raising DimensionError otherwise."""
    arr = np.asarray(getattr(x, "matrix", x), dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius distance ``||h - h^dagger|| / max(1, ||h||)``."""
    return frobenius(h - dagger(h)) / max(1.0, frobenius(h))


def is_hermitian(h, atol: float = ATOL_EXACT) -> bool:
    return hermiticity_defect(as_matrix(h)) < atol


def _require_hermitian(h, name: str = "Hamiltonian") -> np.ndarray:
    h = as_matrix(h, name)
    defect = hermiticity_defect(h)
    if defect >= ATOL_EXACT:
        raise NotHermitianError(f"{name} is not Hermitian (relative defect {defect:.3e})")
    return h


def kron(a, b) -> np.ndarray:
    """Tensor product with row index ``i * dim(b) + k``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def kron_all(ops: Sequence) -> np.ndarray:
    if not ops:
        raise DimensionError("kron_all needs at least one operator")
    return reduce(kron, ops)


def weighted_partial_trace(x, dims: tuple[int, int], rho_b) -> np.ndarray:
    r"""Pair the second tensor factor of ``x`` with ``rho_b``.

    Returns the operator :math:`\Gamma_\rho(X)` on the first factor fixed by
    ``tr[Gamma(X) sigma] = tr[X (sigma (x) rho_b)]`` for every ``sigma``.

    Parameters
    ----------
    x : (d_a*d_b, d_a*d_b) array
        Operator on the composite space, first factor outermost.
    dims : tuple of int
        ``(d_a, d_b)``.
    rho_b : DensityState or array
        Weight on the traced-out factor. Any square operator is accepted;
        the map is linear in it.

    Returns
    -------
    (d_a, d_a) complex array
    """
    x = as_matrix(x, "x")
    rho = as_matrix(rho_b, "rho_b")
    d_a, d_b = (int(d) for d in dims)
    if d_a < 1 or d_b < 1 or x.shape[0] != d_a * d_b:
        raise DimensionError(f"x has dim {x.shape[0]}, expected {d_a}*{d_b}")
    if rho.shape[0] != d_b:
        raise DimensionError(f"rho_b has dim {rho.shape[0]}, expected {d_b}")
    x4 = x.reshape(d_a, d_b, d_a, d_b)
    return np.einsum("ikjl,lk->ij", x4, rho)


def partial_trace(x, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Ordinary partial trace over every factor not listed in ``keep``."""
    x = as_matrix(x, "x")
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != x.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to {x.shape[0]}")
    n = len(dims)
    keep = sorted(set(keep))
    t = x.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = keep + [i + n for i in keep]
    t = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


class SpectralDecomposition(NamedTuple):
    """Eigen-pairs of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def function(self, f) -> np.ndarray:
        """Apply a scalar function through the spectrum: ``V f(Lambda) V^dagger``."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ dagger(v)


def hermitian_eig(h) -> SpectralDecomposition:
    h = _require_hermitian(h)
    # symmetrise so LAPACK sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    return SpectralDecomposition(w, v)


def unitary_from_spectrum(dec: SpectralDecomposition, t: float) -> np.ndarray:
    """``exp(-i H t)`` from a precomputed decomposition of ``H``."""
    if t == 0:
        return np.eye(dec.eigenvalues.size, dtype=np.complex128)
    return dec.function(lambda w: np.exp(-1j * w * t))


def evolve_unitary(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` computed through the spectral decomposition of ``h``."""
    return unitary_from_spectrum(hermitian_eig(h), float(t))


def heisenberg(a, h, t: float) -> np.ndarray:
    """Heisenberg-evolved operator ``exp(i h t) a exp(-i h t)``."""
    a = as_matrix(a, "a")
    h = as_matrix(h, "h")
    if a.shape != h.shape:
        raise DimensionError(f"operator dim {a.shape[0]} != Hamiltonian dim {h.shape[0]}")
    u = evolve_unitary(h, t)
    return dagger(u) @ a @ u


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (g + dagger(g)) / np.sqrt(dim)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary (QR of a complex Ginibre matrix with phase fix)."""
    g = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
