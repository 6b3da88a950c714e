import numpy as np
import pytest
from hypothesis import given, strategies as st

from chronon import opalg
from chronon.clock import (
    CyclicClock,
    check_time_covariance,
    cyclic_hamiltonian,
    period_defect,
    random_cyclic_hamiltonian,
    shift_action,
)
from chronon.errors import DimensionError

dims = st.integers(1, 12)


@given(dims)
def test_position_projectors_resolve_identity(d):
    clock = CyclicClock(d)
    p = clock.position_projectors
    assert opalg.frobenius(p.sum(axis=0) - np.eye(d)) < 1e-12
    for n in range(d):
        assert abs(np.trace(p[n]) - 1) < 1e-12
        for m in range(d):
            expected = p[n] if n == m else 0
            assert opalg.frobenius(p[n] @ p[m] - expected) < 1e-12


@given(dims)
def test_fourier_vectors_orthonormal(d):
    f = CyclicClock(d).fourier_vectors
    assert opalg.frobenius(f.conj().T @ f - np.eye(d)) < 1e-12


@given(st.integers(1, 10), st.integers(-20, 20))
def test_shift_unitary_moves_basis_down(d, k):
    clock = CyclicClock(d)
    for n in range(d):
        out = clock.shift_unitary(k) @ clock.position_vector(n)
        assert abs(abs(out[(n - k) % d]) - 1) < 1e-10


def test_shift_action_examples(rng):
    clock = CyclicClock(3)
    assert opalg.frobenius(shift_action(clock, clock.position_projector(1), 1) - clock.position_projector(0)) < 1e-10
    a = opalg.random_hermitian(rng, 3)
    assert opalg.frobenius(shift_action(clock, a, 0) - a) < 1e-12
    assert opalg.frobenius(shift_action(clock, a, 3) - a) < 1e-10


def test_shift_action_dyads(rng):
    clock = CyclicClock(5)
    for n in range(5):
        for m in range(5):
            dyad = np.outer(clock.position_vector(n), clock.position_vector(m))
            out = shift_action(clock, dyad, 2)
            target = np.outer(clock.position_vector(n - 2), clock.position_vector(m - 2))
            assert opalg.frobenius(out - target) < 1e-10


def test_shift_action_dimension_mismatch():
    with pytest.raises(DimensionError):
        shift_action(CyclicClock(3), np.eye(2), 1)


@pytest.mark.parametrize("d", [1, 2, 3, 8, 16])
def test_time_covariance_exact(d):
    report = check_time_covariance(CyclicClock(d))
    assert report.passed
    assert report.max_deviation < 1e-10


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_corrupted_generator_detected(d):
    clock = CyclicClock.corrupted(d)
    assert not clock.is_exact
    report = check_time_covariance(clock)
    assert not report.passed
    assert report.max_deviation >= 0.1
    assert all(dev >= report.atol for _, _, dev in report.failures)


def test_fourier_projectors_are_shift_invariant():
    clock = CyclicClock(6)
    for m in range(6):
        for k in range(6):
            p = clock.fourier_projector(m)
            assert opalg.frobenius(shift_action(clock, p, k) - p) < 1e-10


def test_projector_onto_wraps_labels():
    clock = CyclicClock(4)
    assert np.array_equal(clock.projector_onto([3, 4, 5]).diagonal().real, [1, 1, 0, 1])


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 12))
def test_cyclic_hamiltonian_has_period_d(seed, dim, d):
    h = random_cyclic_hamiltonian(np.random.default_rng(seed), dim, d)
    assert opalg.is_hermitian(h)
    assert period_defect(h, d) < 1e-10


def test_generic_hamiltonian_is_not_periodic(rng):
    h = opalg.random_hermitian(rng, 3)
    assert period_defect(h, 8) > 1e-3


def test_cyclic_hamiltonian_levels():
    h = cyclic_hamiltonian([0, 1, 3], np.eye(3), 4)
    assert np.allclose(np.diag(h).real, [0, np.pi / 2, 3 * np.pi / 2])
