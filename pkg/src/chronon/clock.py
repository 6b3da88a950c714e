"""The cyclic Z_d clock.

Position states ``|n>`` (n = 0..d-1) are the ticks of the clock. Fourier states
``|f_m> = d^{-1/2} sum_n exp(2 pi i m n / d) |n>`` diagonalise the shift
generator ``P = sum_m (2 pi m / d) |f_m><f_m|``, chosen so that
``exp(i P k) |n> = |n - k>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import opalg
from .errors import DimensionError

COVARIANCE_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class CyclicClock:
    """Clock with ``d`` ticks.

    ``generator_scale`` multiplies the integer Fourier label ``m`` in the
    spectrum of the shift generator. The default ``2 pi / d`` gives the exact
    cyclic shift; any other value yields a deliberately broken clock, which is
    only useful for testing detection of covariance failures.
    """

    d: int
    generator_scale: float | None = None
    position_projectors: np.ndarray = field(init=False, repr=False)
    fourier_vectors: np.ndarray = field(init=False, repr=False)
    shift_generator: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = int(self.d)
        if d < 1:
            raise DimensionError(f"clock needs d >= 1, got {self.d}")
        object.__setattr__(self, "d", d)
        scale = 2 * np.pi / d if self.generator_scale is None else float(self.generator_scale)
        object.__setattr__(self, "generator_scale", scale)

        eye = np.eye(d, dtype=np.complex128)
        projectors = np.einsum("ni,nj->nij", eye, eye)
        n = np.arange(d)
        # column m is |f_m>
        fourier = np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)
        generator = (fourier * (scale * n)) @ opalg.dagger(fourier)
        generator = 0.5 * (generator + opalg.dagger(generator))
        for a in (projectors, fourier, generator):
            a.setflags(write=False)
        object.__setattr__(self, "position_projectors", projectors)
        object.__setattr__(self, "fourier_vectors", fourier)
        object.__setattr__(self, "shift_generator", generator)

    @classmethod
    def corrupted(cls, d: int) -> "CyclicClock":
        """Clock whose generator lacks the ``2 pi / d`` factor (integer spectrum)."""
        return cls(d, generator_scale=1.0)

    @property
    def is_exact(self) -> bool:
        return np.isclose(self.generator_scale, 2 * np.pi / self.d, rtol=0, atol=1e-15)

    def position_vector(self, n: int) -> np.ndarray:
        v = np.zeros(self.d, dtype=np.complex128)
        v[n % self.d] = 1.0
        return v

    def position_projector(self, n: int) -> np.ndarray:
        return self.position_projectors[n % self.d]

    def fourier_vector(self, m: int) -> np.ndarray:
        return self.fourier_vectors[:, m % self.d]

    def fourier_projector(self, m: int) -> np.ndarray:
        f = self.fourier_vector(m)
        return np.outer(f, f.conj())

    def position_operator(self) -> np.ndarray:
        """``Q = sum_n n |n><n|``, the sharp absolute time operator."""
        return np.diag(np.arange(self.d)).astype(np.complex128)

    def shift_unitary(self, k: float) -> np.ndarray:
        """``exp(i P k)``; maps ``|n>`` to ``|n - k>`` for integer ``k``."""
        return opalg.evolve_unitary(self.shift_generator, -k)

    def projector_onto(self, labels) -> np.ndarray:
        """Spectral projector of the position onto a set of labels (taken mod d)."""
        out = np.zeros((self.d, self.d), dtype=np.complex128)
        for n in {int(x) % self.d for x in labels}:
            out[n, n] = 1.0
        return out


def shift_action(clock: CyclicClock, a, k: int) -> np.ndarray:
    """Conjugate ``a`` by the clock shift: ``exp(i P k) a exp(-i P k)``.

    On basis dyads this is ``|n><m| -> |n-k><m-k|`` with labels mod ``d``.
    """
    a = opalg.as_matrix(a, "a")
    if a.shape[0] != clock.d:
        raise DimensionError(f"operator dim {a.shape[0]} != clock size {clock.d}")
    return opalg.heisenberg(a, clock.shift_generator, k)


@dataclass(frozen=True)
class CovarianceReport:
    d: int
    max_deviation: float
    failures: tuple[tuple[int, int, float], ...]
    atol: float = COVARIANCE_ATOL

    @property
    def passed(self) -> bool:
        return not self.failures


def check_time_covariance(clock: CyclicClock, atol: float = COVARIANCE_ATOL) -> CovarianceReport:
    """Exhaustively check ``alpha_k(|n><n|) = |n-k><n-k|`` for all n, k in Z_d.

    Failures are collected as ``(n, k, deviation)`` triples rather than raised.
    """
    d = clock.d
    dec = opalg.hermitian_eig(clock.shift_generator)
    worst = 0.0
    failures = []
    for k in range(d):
        u = opalg.unitary_from_spectrum(dec, -k)
        for n in range(d):
            shifted = u @ clock.position_projector(n) @ opalg.dagger(u)
            dev = opalg.frobenius(shifted - clock.position_projector(n - k))
            worst = max(worst, dev)
            if dev >= atol:
                failures.append((n, k, dev))
    return CovarianceReport(d, worst, tuple(failures), atol)


def cyclic_hamiltonian(levels, basis: np.ndarray, d: int) -> np.ndarray:
    """Hamiltonian ``V diag(2 pi levels / d) V^dagger`` whose evolution has period ``d``.

    The system shift ``alpha_k`` is an action of Z_d (and hence compatible with
    the cyclic clock) exactly when ``exp(-i H d)`` is a multiple of the
    identity, i.e. when the spectrum lies on a common shift of ``(2 pi / d) Z``.
    """
    levels = np.asarray(levels, dtype=float)
    basis = opalg.as_matrix(basis, "basis")
    h = (basis * (2 * np.pi * levels / d)) @ opalg.dagger(basis)
    return 0.5 * (h + opalg.dagger(h))


def random_cyclic_hamiltonian(rng: np.random.Generator, dim: int, d: int) -> np.ndarray:
    """Random Hermitian ``H`` with Haar-random eigenbasis and spectrum in ``(2 pi / d) Z_d``."""
    levels = rng.integers(0, d, size=dim)
    return cyclic_hamiltonian(levels, opalg.random_unitary(rng, dim), d)


def period_defect(h, d: int) -> float:
    """Distance of ``exp(-i H d)`` from the nearest multiple of the identity."""
    u = opalg.evolve_unitary(h, d)
    phase = np.trace(u) / u.shape[0]
    if abs(phase) > 0:
        phase /= abs(phase)
    return opalg.frobenius(u - phase * np.eye(u.shape[0]))
