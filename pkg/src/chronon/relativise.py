"""Relativisation of operators against a cyclic reference clock.

Tensor factors are always ordered system (S), clock (C), reference (R).
A relativised operator lives on ``first (x) R`` where ``first`` is S or C; use
:func:`insert_identity` to place it on the full S (x) C (x) R space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import opalg
from .clock import CyclicClock
from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class RelativisedObservable:
    """An operator made invariant under the joint shift of its factors.

    Attributes
    ----------
    matrix : ndarray
        Operator on the tensor product of ``dims``.
    dims : tuple of int
        Subsystem dimensions, outermost first.
    factors : tuple of str
        Names of the factors, e.g. ``("S", "R")``.
    provenance : str
        Human-readable description of the source operator and reference.
    local_generator : ndarray or None
        Generator of time shifts on every factor except the reference; used for
        the restriction-covariance check.
    translated : callable or None
        ``t -> RelativisedObservable`` giving the observable whose restriction
        the restriction of this one must equal after a local shift by ``t``.
    """

    matrix: np.ndarray = field(repr=False)
    dims: tuple[int, ...]
    factors: tuple[str, ...]
    provenance: str = ""
    local_generator: np.ndarray | None = field(default=None, repr=False)
    translated: Callable[[int], "RelativisedObservable"] | None = field(default=None, repr=False)

    def __post_init__(self):
        if int(np.prod(self.dims)) != self.matrix.shape[0]:
            raise DimensionError(f"matrix dim {self.matrix.shape[0]} != prod{self.dims}")

    @property
    def reference_dim(self) -> int:
        return self.dims[-1]


def _block_diag_over_reference(blocks: np.ndarray) -> np.ndarray:
    """``sum_m blocks[m] (x) |m><m|`` for a stack of ``d`` first-factor blocks."""
    d, da, _ = blocks.shape
    out = np.zeros((da, d, da, d), dtype=np.complex128)
    idx = np.arange(d)
    out[:, idx, :, idx] = blocks
    return out.reshape(da * d, da * d)


def relativise_system(a, h_s, clock_r: CyclicClock) -> RelativisedObservable:
    """Relativise a system operator against the reference clock's position POVM.

    Returns ``sum_m alpha_{-m}(a) (x) |m><m|`` on S (x) R, with
    ``alpha_t(a) = exp(i H_S t) a exp(-i H_S t)``.
    """
    a = opalg.as_matrix(a, "a")
    h_s = opalg.as_matrix(h_s, "h_s")
    if a.shape != h_s.shape:
        raise DimensionError(f"operator dim {a.shape[0]} != Hamiltonian dim {h_s.shape[0]}")
    dec = opalg.hermitian_eig(h_s)
    d = clock_r.d
    blocks = np.empty((d, a.shape[0], a.shape[0]), dtype=np.complex128)
    for m in range(d):
        # alpha_{-m}(a) = U(-m)^dagger a U(-m) with U(t) = exp(-i H t)
        u = opalg.unitary_from_spectrum(dec, -m)
        blocks[m] = opalg.dagger(u) @ a @ u

    def translated(t: int) -> RelativisedObservable:
        return relativise_system(opalg.heisenberg(a, h_s, t), h_s, clock_r)

    return RelativisedObservable(
        matrix=_block_diag_over_reference(blocks),
        dims=(a.shape[0], d),
        factors=("S", "R"),
        provenance=f"system operator relativised against position POVM of Z_{d} reference",
        local_generator=h_s,
        translated=translated,
    )


def relativise_clock_povm(clock_c: CyclicClock, clock_r: CyclicClock, n: int) -> RelativisedObservable:
    """Relative time effect ``sum_m |n+m><n+m| (x) |m><m|`` on C (x) R (labels mod d)."""
    if clock_c.d != clock_r.d:
        raise DimensionError(f"clock sizes differ: {clock_c.d} != {clock_r.d}")
    d = clock_c.d
    blocks = np.stack([clock_c.position_projector(n + m) for m in range(d)])

    def translated(t: int) -> RelativisedObservable:
        return relativise_clock_povm(clock_c, clock_r, n - t)

    return RelativisedObservable(
        matrix=_block_diag_over_reference(blocks),
        dims=(d, d),
        factors=("C", "R"),
        provenance=f"clock position |{n % d}> relativised against Z_{d} reference",
        local_generator=clock_c.shift_generator,
        translated=translated,
    )


def relative_time_povm(clock_c: CyclicClock, clock_r: CyclicClock) -> list[RelativisedObservable]:
    return [relativise_clock_povm(clock_c, clock_r, n) for n in range(clock_c.d)]


def insert_identity(x, dims: Sequence[int], position: int, dim_new: int) -> np.ndarray:
    """Tensor an identity on a new factor into ``x`` at ``position``.

    ``insert_identity(X_SR, (dS, d), 1, d)`` gives ``X`` acting on S (x) C (x) R
    with the identity on C.
    """
    x = opalg.as_matrix(x, "x")
    dims = [int(v) for v in dims]
    if int(np.prod(dims)) != x.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to {x.shape[0]}")
    n = len(dims)
    t = np.multiply.outer(x.reshape(dims + dims), np.eye(dim_new))
    # t axes: rows(0..n-1), cols(n..2n-1), new_row(2n), new_col(2n+1)
    t = np.moveaxis(t, [2 * n, 2 * n + 1], [position, n + 1 + position])
    new_dims = dims[:position] + [dim_new] + dims[position:]
    total = int(np.prod(new_dims))
    return t.reshape(total, total)


def embed(obs: RelativisedObservable, position: int, dim_new: int, name: str) -> RelativisedObservable:
    """Return ``obs`` with an identity factor called ``name`` inserted at ``position``."""
    dims = list(obs.dims)
    return RelativisedObservable(
        matrix=insert_identity(obs.matrix, dims, position, dim_new),
        dims=tuple(dims[:position] + [dim_new] + dims[position:]),
        factors=obs.factors[:position] + (name,) + obs.factors[position:],
        provenance=obs.provenance + f" (identity on {name})",
    )


def conjugate_local(x: np.ndarray, dims: Sequence[int], unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """``W^dagger X W`` for ``W = W_1 (x) ... (x) W_n``, applied factor by factor."""
    dims = [int(v) for v in dims]
    n = len(dims)
    if len(unitaries) != n:
        raise DimensionError(f"{len(unitaries)} unitaries for {n} factors")
    t = np.asarray(x).reshape(dims + dims)
    for i, w in enumerate(unitaries):
        if w.shape != (dims[i], dims[i]):
            raise DimensionError(f"unitary {i} has shape {w.shape}, factor dim is {dims[i]}")
        t = np.moveaxis(np.tensordot(opalg.dagger(w), t, axes=([1], [i])), 0, i)
        t = np.moveaxis(np.tensordot(t, w, axes=([n + i], [0])), -1, n + i)
    total = int(np.prod(dims))
    return t.reshape(total, total)


def check_invariance(obs: RelativisedObservable, total_h, times: Iterable[float] | None = None) -> float:
    """Largest Frobenius change of ``obs`` under the total time shift.

    ``total_h`` is either the dense total Hamiltonian on the full space of
    ``obs`` or a sequence of local generators, one per factor, whose sum is the
    (additive) total Hamiltonian. The local form avoids dense products on large
    spaces. ``times`` defaults to every ``k`` in Z_d of the reference.
    """
    times = range(obs.reference_dim) if times is None else list(times)
    m = obs.matrix
    worst = 0.0
    if isinstance(total_h, (list, tuple)):
        gens = [opalg.as_matrix(g, "generator") for g in total_h]
        if [g.shape[0] for g in gens] != list(obs.dims):
            raise DimensionError(f"generator dims {[g.shape[0] for g in gens]} != {list(obs.dims)}")
        decs = [opalg.hermitian_eig(g) for g in gens]
        for t in times:
            us = [opalg.unitary_from_spectrum(dec, t) for dec in decs]
            worst = max(worst, opalg.frobenius(conjugate_local(m, obs.dims, us) - m))
        return worst
    h = opalg.as_matrix(total_h, "total_h")
    if h.shape != m.shape:
        raise DimensionError(f"Hamiltonian dim {h.shape[0]} != observable dim {m.shape[0]}")
    dec = opalg.hermitian_eig(h)
    for t in times:
        u = opalg.unitary_from_spectrum(dec, t)
        worst = max(worst, opalg.frobenius(opalg.dagger(u) @ m @ u - m))
    return worst


def restrict(obs: RelativisedObservable, rho_r) -> np.ndarray:
    """Restriction ``Gamma_rho(obs)`` to everything but the reference factor."""
    first = int(np.prod(obs.dims[:-1]))
    return opalg.weighted_partial_trace(obs.matrix, (first, obs.reference_dim), rho_r)


def check_restriction_covariance(obs: RelativisedObservable, rho_r=None, times: Iterable[int] | None = None) -> float:
    """Largest deviation from covariance under restriction.

    Compares ``V(t)^dagger Gamma_rho(obs) V(t)`` with ``Gamma_rho(obs.translated(t))``
    for every ``t`` in ``times`` (default Z_d). With ``rho_r=None`` every
    operator-basis element ``|i><j|`` of the reference is used as the weight;
    since the restriction is linear in the weight, this certifies the
    condition for all reference states at once.
    """
    if obs.local_generator is None or obs.translated is None:
        raise ValueError("observable carries no local dynamics to check covariance against")
    d = obs.reference_dim
    times = range(d) if times is None else list(times)
    if rho_r is None:
        weights = [np.outer(np.eye(d)[i], np.eye(d)[j]) for i in range(d) for j in range(d)]
    else:
        weights = [opalg.as_matrix(rho_r, "rho_r")]
    dec = opalg.hermitian_eig(obs.local_generator)
    worst = 0.0
    for t in times:
        u = opalg.unitary_from_spectrum(dec, t)
        target = obs.translated(t)
        for w in weights:
            lhs = opalg.dagger(u) @ restrict(obs, w) @ u
            worst = max(worst, opalg.frobenius(lhs - restrict(target, w)))
    return worst


def exchange_identity_check(clock_c: CyclicClock, clock_r: CyclicClock, subsets: Iterable[Iterable[int]] | None = None) -> float:
    """Compare the two forms of the relativised clock POVM on sets of labels.

    Left: ``sum_m E_C(X + m) (x) E_R(m)``. Right: ``sum_u E_C(u) (x) E_R(u - X)``.
    Checked for every singleton, the full set, and any extra ``subsets``.
    """
    if clock_c.d != clock_r.d:
        raise DimensionError(f"clock sizes differ: {clock_c.d} != {clock_r.d}")
    d = clock_c.d
    sets = [[x] for x in range(d)] + [list(range(d))]
    if subsets is not None:
        sets += [list(s) for s in subsets]
    worst = 0.0
    for xs in sets:
        left = sum(
            np.kron(clock_c.projector_onto([x + m for x in xs]), clock_r.position_projector(m))
            for m in range(d)
        )
        right = sum(
            np.kron(clock_c.position_projector(u), clock_r.projector_onto([u - x for x in xs]))
            for u in range(d)
        )
        worst = max(worst, float(np.max(np.abs(left - right))))
    return worst

