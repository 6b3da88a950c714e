import numpy as np
import pytest
from hypothesis import given, strategies as st

from chronon import opalg, quantum
from chronon.errors import DimensionError, NotComplete, NotHermitianError, NotNormalized, NotPositive, NotUnitTrace

seeds = st.integers(0, 2**32 - 1)


def test_validate_state_examples():
    assert quantum.validate_state(np.eye(2) / 2).dim == 2
    assert quantum.validate_state(np.diag([1.0, 0.0])).purity == pytest.approx(1.0)
    with pytest.raises(NotPositive):
        quantum.validate_state(np.diag([1.2, -0.2]))
    with pytest.raises(NotUnitTrace):
        quantum.validate_state(np.eye(2))
    with pytest.raises(NotHermitianError):
        quantum.validate_state(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_states_are_read_only():
    rho = quantum.maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_validate_povm_examples():
    assert len(quantum.validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])) == 2
    assert len(quantum.validate_povm([np.eye(2) / 2, np.eye(2) / 2])) == 2
    with pytest.raises(NotComplete):
        quantum.validate_povm([np.diag([1.0, 0.0])])


def test_povm_labels():
    povm = quantum.validate_povm([np.eye(2) / 2, np.eye(2) / 2], outcomes=[5, 9])
    assert povm.outcomes == (5, 9)
    assert np.allclose(povm[9], np.eye(2) / 2)


def test_probabilities_examples(rng):
    p = quantum.probabilities(quantum.basis_state(2, 0), quantum.sharp_basis_povm(2))
    assert np.allclose(p, [1.0, 0.0])
    e = quantum.random_povm(rng, 2, 2).effects[0]
    povm = quantum.validate_povm([e, np.eye(2) - e])
    half = np.real(np.trace(e)) / 2
    assert np.allclose(quantum.probabilities(quantum.maximally_mixed(2), povm), [half, 1 - half], atol=1e-12)


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_probabilities_match_index_sum(seed, dim, n_out):
    rng = np.random.default_rng(seed)
    rho = quantum.random_density(rng, dim)
    povm = quantum.random_povm(rng, dim, n_out)
    got = quantum.probabilities(rho, povm)
    for k, e in enumerate(povm.effects):
        ref = sum(rho.matrix[i, j] * e[j, i] for i in range(dim) for j in range(dim))
        assert abs(got[k] - ref.real) < 1e-12
    assert abs(got.sum() - 1.0) < 1e-10
    assert np.all(got >= -1e-12)


def test_probabilities_dimension_mismatch():
    with pytest.raises(DimensionError):
        quantum.probabilities(quantum.maximally_mixed(3), quantum.sharp_basis_povm(2))


def test_product_state(rng):
    a, b = quantum.random_pure_vector(rng, 2), quantum.random_pure_vector(rng, 3)
    prod = quantum.product_state([quantum.pure_state(a), quantum.pure_state(b)])
    v = np.kron(a, b)
    assert np.allclose(prod.matrix, np.outer(v, v.conj()), atol=1e-14)
    parts = [quantum.random_density(rng, d) for d in (2, 3, 2)]
    rho = quantum.product_state(parts)
    assert abs(np.trace(rho.matrix) - 1.0) < 1e-12
    sc = opalg.partial_trace(rho.matrix, (2, 3, 2), [0, 1])
    assert np.allclose(sc, np.kron(parts[0].matrix, parts[1].matrix), atol=1e-12)


def test_pure_state_requires_normalised():
    with pytest.raises(NotNormalized):
        quantum.pure_state(np.array([1.0, 1.0]))


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_random_objects_valid(seed, dim, n_out):
    rng = np.random.default_rng(seed)
    rho = quantum.random_density(rng, dim)
    quantum.validate_state(rho.matrix)
    povm = quantum.random_povm(rng, dim, n_out)
    assert opalg.frobenius(sum(povm.effects) - np.eye(dim)) < 1e-10
    for e in povm.effects:
        w = np.linalg.eigvalsh(e)
        assert w.min() > -1e-10 and w.max() < 1 + 1e-10


def test_random_density_rank(rng):
    rho = quantum.random_density(rng, 4, rank=1)
    assert rho.purity == pytest.approx(1.0)
