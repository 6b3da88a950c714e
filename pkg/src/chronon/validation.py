"""Seeded invariant suite run by ``chronon validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import continuum, opalg, profiles, pw, quantum
from .clock import CyclicClock, check_time_covariance, random_cyclic_hamiltonian, shift_action
from .relativise import (
    check_invariance,
    check_restriction_covariance,
    exchange_identity_check,
    insert_identity,
    relativise_clock_povm,
    relativise_system,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    above: bool = False  # pass when value > tolerance instead of below it

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return bool(self.value > self.tolerance) if self.above else bool(self.value < self.tolerance)

    def line(self) -> str:
        op = ">" if self.above else "<"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<42s} {self.value:.3e} {op} {self.tolerance:.0e}"

    def as_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tolerance": float(self.tolerance),
                "comparison": ">" if self.above else "<", "passed": bool(self.passed)}


def _opalg_checks(rng) -> list[Check]:
    h = opalg.random_hermitian(rng, 4)
    dec = opalg.hermitian_eig(h)
    recon = opalg.frobenius(dec.reconstruct() - h) / max(1.0, opalg.frobenius(h))
    group = opalg.frobenius(opalg.evolve_unitary(h, 0.3) @ opalg.evolve_unitary(h, 1.7) - opalg.evolve_unitary(h, 2.0))
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = quantum.random_density(rng, 2)
    gamma = opalg.weighted_partial_trace(x, (2, 2), rho)
    duality = 0.0
    for _ in range(10):
        sigma = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        duality = max(duality, abs(np.trace(gamma @ sigma) - np.trace(x @ np.kron(sigma, rho.matrix))))
    e = quantum.random_povm(rng, 3, 2).effects[0]
    h3 = opalg.random_hermitian(rng, 3)
    comp = opalg.frobenius(opalg.heisenberg(opalg.heisenberg(e, h3, 1.7), h3, 0.3) - opalg.heisenberg(e, h3, 2.0))
    return [
        Check("opalg.eig_reconstruction", recon, 1e-10),
        Check("opalg.unitary_group_law", group, 1e-10),
        Check("opalg.partial_trace_duality", duality, 1e-12),
        Check("opalg.heisenberg_composition", comp, 1e-10),
    ]


def _quantum_checks(rng, dim: int) -> list[Check]:
    rho = quantum.random_density(rng, dim)
    povm = quantum.random_povm(rng, dim, 3)
    norm = abs(quantum.probabilities(rho, povm).sum() - 1.0)
    h = opalg.random_hermitian(rng, dim)
    evolved = sum(opalg.heisenberg(e, h, 0.7) for e in povm.effects)
    return [
        Check("quantum.probability_normalisation", norm, 1e-10),
        Check("quantum.completeness_under_evolution", opalg.frobenius(evolved - np.eye(dim)), 1e-10),
    ]


def run_suite(d: int = 8, dim_s: int = 2, seed: int = 0, corrupt_generator: bool = False) -> list[Check]:
    """Run every invariant once with fixed seeds and return the measured deviations."""
    rng = np.random.default_rng(seed)
    clock = CyclicClock.corrupted(d) if corrupt_generator else CyclicClock(d)
    checks = _opalg_checks(rng) + _quantum_checks(rng, dim_s)

    checks.append(Check("clock.time_covariance", check_time_covariance(clock).max_deviation, 1e-10))
    fourier_dev = max(
        opalg.frobenius(shift_action(clock, clock.fourier_projector(m), k) - clock.fourier_projector(m))
        for m in range(d) for k in range(d)
    )
    checks.append(Check("clock.fourier_states_invariant", fourier_dev, 1e-10))

    h_s = random_cyclic_hamiltonian(rng, dim_s, d)
    povm = quantum.random_povm(rng, dim_s, 3)
    gens = pw.local_generators(h_s, clock, clock)
    rel_a = [relativise_system(e, h_s, clock) for e in povm.effects]
    rel_z = [relativise_clock_povm(clock, clock, n) for n in range(d)]
    checks.append(Check("relativise.system_invariance", max(check_invariance(o, [gens[0], gens[2]]) for o in rel_a), 1e-10))
    checks.append(Check("relativise.clock_povm_invariance", max(check_invariance(z, [gens[1], gens[2]]) for z in rel_z), 1e-10))
    cov = max(check_restriction_covariance(o) for o in rel_a + rel_z)
    checks.append(Check("relativise.restriction_covariance", cov, 1e-10))
    checks.append(Check("relativise.exchange_identity", exchange_identity_check(clock, clock), 1e-12))
    eye_s, eye_d = np.eye(dim_s), np.eye(d)
    comm = 0.0
    for o in rel_a:
        a_full = insert_identity(o.matrix, o.dims, 1, d)
        for z in rel_z:
            z_full = np.kron(eye_s, z.matrix)
            comm = max(comm, opalg.frobenius(a_full @ z_full - z_full @ a_full))
    checks.append(Check("relativise.commutation", comm, 1e-12))

    joint = pw.joint_observable(povm, h_s, clock, clock)
    total = sum(joint.entry(k, n) for k in joint.outcomes for n in range(d))
    checks.append(Check("pw.joint_completeness", opalg.frobenius(total - np.eye(dim_s * d * d)), 1e-10))
    psi = quantum.random_pure_vector(rng, dim_s)
    rho_s = quantum.pure_state(psi)
    xi = clock.fourier_vector(0)
    table = pw.joint_probability(joint, pw.engine_state(rho_s, clock, 0, xi))
    ref = pw.heisenberg_prediction(rho_s, povm, h_s, d)
    checks.append(Check("pw.heisenberg_recovery", float(np.nanmax(np.abs(table.conditional - ref))), 1e-10))
    lam = quantum.random_pure_vector(rng, d)
    ent = pw.joint_probability(joint, pw.entangled_state(lam, h_s, clock, clock, psi, xi))
    checks.append(Check("pw.entangled_equivalence", float(np.max(np.abs(ent.joint - table.joint))), 1e-10))
    kuchar = max(pw.kuchar_average(clock.position_projector(n), clock)[1] for n in range(d))
    checks.append(Check("pw.kuchar_projector_average", kuchar, 1e-12))
    nonscalar = min(pw.distance_to_scalar(z.matrix) for z in rel_z)
    checks.append(Check("pw.relative_time_nonscalar", nonscalar, 0.1, above=True))

    checks.extend(_continuum_checks(rng))
    return checks


def _continuum_checks(rng) -> list[Check]:
    system = continuum.SpectralSystem(np.array([0.0, 1.0]), quantum.random_density(rng, 2), quantum.random_povm(rng, 2, 2))
    f_c, f_r = profiles.gaussian(0.05), profiles.gaussian(1.0)
    h = profiles.gaussian(0.1, role="window")
    cross = max(
        abs(continuum.conditional_ratio(system, 0, h, s, f_c, f_r, lam) - continuum.time_domain_ratio(system, 0, h, s, f_c, f_r, lam))
        for lam in (1.0, 4.0, 16.0) for s in (0.0, 0.5, 2.0)
    )
    limit = max(
        abs(continuum.conditional_ratio(system, 0, h, s, f_c, f_r, 64.0) - continuum.limit_conditional(system, 0, h, s, f_c))
        for s in (0.0, 0.5, 2.0)
    )
    filt = sum(continuum.effective_operator(system, k, None, f_c) for k in system.povm.outcomes)
    return [
        Check("continuum.cross_oracle", cross, 1e-6),
        Check("continuum.limit_at_lambda_64", limit, 1e-3),
        Check("continuum.filter_completeness", opalg.frobenius(filt - np.eye(2)), 1e-10),
    ]

