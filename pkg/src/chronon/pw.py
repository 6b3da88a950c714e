"""Discrete conditional-probability engine on system (x) clock (x) reference.

The joint observable pairs the relativised system POVM with the relative time
of clock and reference::

    M(k, n) = sum_m alpha_{-m}(A(k)) (x) |n+m><n+m| (x) |m><m|

Conditioning its statistics on the relative time ``n`` gives back the
Heisenberg-evolved system statistics ``tr[rho_S alpha_n(A(k))]`` when the clock
starts at ``|0>`` and the reference is spread over all ticks.

The system shift ``alpha_k`` must be a Z_d action, i.e. ``exp(-i H_S d)`` has to
be a multiple of the identity (see :func:`chronon.clock.random_cyclic_hamiltonian`).
Otherwise the relativised operators are not invariant and the labels
``m`` and ``m - d`` give different answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import opalg
from .clock import CyclicClock, shift_action
from .errors import AllMarginalsZero, DimensionError, NotNormalized
from .quantum import DensityState, Povm, product_state, pure_state
from .relativise import RelativisedObservable

MARGINAL_THRESHOLD = 1e-12


def _check_clocks(clock_c: CyclicClock, clock_r: CyclicClock) -> int:
    if clock_c.d != clock_r.d:
        raise DimensionError(f"clock sizes differ: {clock_c.d} != {clock_r.d}")
    return clock_c.d


def total_hamiltonian(h_s, clock_c: CyclicClock, clock_r: CyclicClock) -> np.ndarray:
    """Dense ``H_S (x) 1 (x) 1 + 1 (x) P_C (x) 1 + 1 (x) 1 (x) P_R``."""
    h_s = opalg.as_matrix(h_s, "h_s")
    d = _check_clocks(clock_c, clock_r)
    ds = h_s.shape[0]
    eye_s, eye_d = np.eye(ds), np.eye(d)
    return (
        opalg.kron_all([h_s, eye_d, eye_d])
        + opalg.kron_all([eye_s, clock_c.shift_generator, eye_d])
        + opalg.kron_all([eye_s, eye_d, clock_r.shift_generator])
    )


def local_generators(h_s, clock_c: CyclicClock, clock_r: CyclicClock) -> tuple[np.ndarray, ...]:
    """The additive total Hamiltonian as its three local terms (for :func:`check_invariance`)."""
    _check_clocks(clock_c, clock_r)
    return (opalg.as_matrix(h_s, "h_s"), clock_c.shift_generator, clock_r.shift_generator)


@dataclass(frozen=True, eq=False)
class JointObservable:
    """Joint POVM ``M(k, n)`` stored through its system blocks.

    ``blocks[i, m]`` holds ``alpha_{-m}(A(k_i))`` where ``k_i`` is the i-th
    outcome label of ``system_povm``. Dense entries on S (x) C (x) R are built
    on demand with :meth:`entry`.
    """

    d: int
    system_povm: Povm
    h_s: np.ndarray = field(repr=False)
    blocks: np.ndarray = field(repr=False)

    @property
    def dim_s(self) -> int:
        return self.system_povm.dim

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.dim_s, self.d, self.d)

    @property
    def outcomes(self) -> tuple[int, ...]:
        return self.system_povm.outcomes

    def _dense(self, blocks_km: np.ndarray, n: int) -> np.ndarray:
        d, ds = self.d, self.dim_s
        out = np.zeros((ds, d, d, ds, d, d), dtype=np.complex128)
        m = np.arange(d)
        c = (n + m) % d
        out[:, c, m, :, c, m] = blocks_km
        return out.reshape(ds * d * d, ds * d * d)

    def entry(self, k: int, n: int) -> np.ndarray:
        """Dense ``M(k, n)`` for outcome label ``k`` and relative time ``n``."""
        return self._dense(self.blocks[self.outcomes.index(k)], n)

    def entries(self):
        """Yield ``((k, n), M(k, n))`` over all outcomes and relative times."""
        for k in self.outcomes:
            for n in range(self.d):
                yield (k, n), self.entry(k, n)

    def as_observable(self, k: int, n: int) -> RelativisedObservable:
        return RelativisedObservable(
            matrix=self.entry(k, n),
            dims=self.dims,
            factors=("S", "C", "R"),
            provenance=f"joint effect M({k}, {n})",
        )


def joint_observable(povm: Povm, h_s, clock_c: CyclicClock, clock_r: CyclicClock) -> JointObservable:
    d = _check_clocks(clock_c, clock_r)
    h_s = opalg.as_matrix(h_s, "h_s")
    if h_s.shape[0] != povm.dim:
        raise DimensionError(f"Hamiltonian dim {h_s.shape[0]} != POVM dim {povm.dim}")
    dec = opalg.hermitian_eig(h_s)
    effects = povm.stacked()
    blocks = np.empty((len(povm), d, povm.dim, povm.dim), dtype=np.complex128)
    for m in range(d):
        u = opalg.unitary_from_spectrum(dec, -m)
        blocks[:, m] = opalg.dagger(u) @ effects @ u
    blocks.setflags(write=False)
    return JointObservable(d, povm, h_s, blocks)


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Joint, marginal and conditional statistics of ``M(k, n)``.

    Rows follow the system POVM's outcome order, columns are relative times
    ``n = 0..d-1``. ``conditional`` is NaN in columns where ``defined`` is False.
    """

    outcomes: tuple[int, ...]
    joint: np.ndarray
    marginal_time: np.ndarray
    conditional: np.ndarray
    defined: np.ndarray
    threshold: float = MARGINAL_THRESHOLD


def conditional(table: ProbabilityTable, threshold: float | None = None) -> np.ndarray:
    """``P(k|n) = P(k, n) / P(n)``, NaN where ``P(n) <= threshold``.

    Raises
    ------
    AllMarginalsZero
        If no relative time has probability above ``threshold``.
    """
    threshold = table.threshold if threshold is None else threshold
    marginal = np.asarray(table.joint).sum(axis=0)
    defined = marginal > threshold
    if not defined.any():
        raise AllMarginalsZero(f"every P(n) is <= {threshold}")
    out = np.full(table.joint.shape, np.nan)
    out[:, defined] = table.joint[:, defined] / marginal[defined]
    return out


def joint_probability(m: JointObservable, rho: DensityState, threshold: float = MARGINAL_THRESHOLD) -> ProbabilityTable:
    """Evaluate ``P(k, n) = tr[rho M(k, n)]`` without forming the dense effects."""
    ds, d = m.dim_s, m.d
    rho_m = opalg.as_matrix(rho, "rho")
    if rho_m.shape[0] != ds * d * d:
        raise DimensionError(f"state dim {rho_m.shape[0]} != {ds}*{d}*{d}")
    t = rho_m.reshape(ds, d, d, ds, d, d)
    n_idx, m_idx = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    c_idx = (n_idx + m_idx) % d
    # blocks of rho on the C (x) R diagonal that M(k, n) touches: shape (n, m, s, s')
    diag = t[:, c_idx, m_idx, :, c_idx, m_idx]
    joint = np.real(np.einsum("nmst,kmts->kn", diag, m.blocks))
    marginal = joint.sum(axis=0)
    table = ProbabilityTable(m.outcomes, joint, marginal, np.empty(0), np.empty(0), threshold)
    cond = conditional(table)
    return ProbabilityTable(m.outcomes, joint, marginal, cond, marginal > threshold, threshold)


def heisenberg_prediction(rho_s, povm: Povm, h_s, d: int, clock_index: int = 0) -> np.ndarray:
    """``tr[rho_S alpha_{n - c}(A(k))]`` for every outcome k and time n, clock started at ``c``."""
    rho_s = opalg.as_matrix(rho_s, "rho_s")
    out = np.empty((len(povm), d))
    for n in range(d):
        for i, e in enumerate(povm.effects):
            out[i, n] = np.real(np.trace(rho_s @ opalg.heisenberg(e, h_s, n - clock_index)))
    return out


def engine_state(rho_s: DensityState, clock_c: CyclicClock, clock_index: int, xi) -> DensityState:
    """Product state ``rho_S (x) |c><c| (x) |xi><xi|``."""
    return product_state([rho_s, pure_state(clock_c.position_vector(clock_index)), pure_state(xi)])


def entangled_state(
    lambdas: Sequence[complex],
    h_s,
    clock_c: CyclicClock,
    clock_r: CyclicClock,
    psi_s,
    xi,
    reference_direction: int = 1,
) -> DensityState:
    """Pure state ``sum_l lambda_l |phi_l> (x) |l> (x) |xi_l>``.

    ``phi_l = exp(-i H_S l) psi_s`` and ``xi_l = exp(i s P_R l) xi`` with
    ``s = reference_direction``. With the default ``s = +1`` the conditional
    statistics agree with the product state only for reference states whose
    position distribution is flat (e.g. Fourier states); ``s = -1`` makes the
    agreement hold for every ``xi``.
    """
    d = _check_clocks(clock_c, clock_r)
    lambdas = np.asarray(lambdas, dtype=np.complex128)
    if lambdas.shape != (d,):
        raise DimensionError(f"need {d} amplitudes, got {lambdas.shape}")
    norm = float(np.sum(np.abs(lambdas) ** 2))
    if abs(norm - 1.0) >= opalg.ATOL_EXACT:
        raise NotNormalized(f"sum |lambda|^2 = {norm:.12g}")
    if reference_direction not in (1, -1):
        raise ValueError("reference_direction must be +1 or -1")
    psi_s = np.asarray(psi_s, dtype=np.complex128)
    xi = np.asarray(xi, dtype=np.complex128)
    dec_s = opalg.hermitian_eig(h_s)
    dec_r = opalg.hermitian_eig(clock_r.shift_generator)
    psi = np.zeros(psi_s.size * d * d, dtype=np.complex128)
    for ell in range(d):
        if lambdas[ell] == 0:
            continue
        phi = opalg.unitary_from_spectrum(dec_s, ell) @ psi_s
        xi_l = opalg.unitary_from_spectrum(dec_r, -reference_direction * ell) @ xi
        psi += lambdas[ell] * np.kron(np.kron(phi, clock_c.position_vector(ell)), xi_l)
    return pure_state(psi)


def kuchar_average(a, clock: CyclicClock) -> tuple[np.ndarray, float]:
    """Average ``a`` over the whole shift orbit and measure how far it is from a scalar.

    Returns
    -------
    average : ndarray
        ``(1/d) sum_k alpha_k(a)``.
    distance_to_scalar : float
        ``min_c ||average - c 1||_F``, attained at ``c = tr(average) / d``.
    """
    a = opalg.as_matrix(a, "a")
    if a.shape[0] != clock.d:
        raise DimensionError(f"operator dim {a.shape[0]} != clock size {clock.d}")
    avg = sum(shift_action(clock, a, k) for k in range(clock.d)) / clock.d
    return avg, distance_to_scalar(avg)


def distance_to_scalar(x) -> float:
    x = opalg.as_matrix(x)
    c = np.trace(x) / x.shape[0]
    return opalg.frobenius(x - c * np.eye(x.shape[0]))
