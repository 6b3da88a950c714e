import numpy as np
import pytest
from hypothesis import given, strategies as st

from chronon import continuum, opalg, profiles, quantum
from chronon.errors import DenominatorVanishes, DimensionError, FilterZeroAtOrigin

LAMBDAS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def two_level(seed=0, n_out=2):
    rng = np.random.default_rng(seed)
    return continuum.SpectralSystem(np.array([0.0, 1.0]), quantum.random_density(rng, 2), quantum.random_povm(rng, 2, n_out))


def gaussian_ratio(sys, k, s, sig_c, sig_r, sig_h, lam):
    """Closed form for all-gaussian profiles centred at zero.

    The frequency integrand is a product of three gaussians, so each gap
    contributes a gaussian damping times a phase linear in ``s``.
    """
    a = sig_c**2 + sig_h**2
    b = (lam * sig_r) ** 2
    gaps = sys.gaps()
    factor = np.exp(-a * b * gaps**2 / (2 * (a + b))) * np.exp(-1j * b * gaps * s / (a + b))
    return float(np.real(np.sum(sys.coefficients(k) * factor) / np.trace(sys.rho.matrix)))


@pytest.fixture(scope="module")
def profs():
    return profiles.gaussian(0.05), profiles.gaussian(1.0), profiles.gaussian(0.1, role="window")


def test_spectral_system_validation(rng):
    with pytest.raises(DimensionError):
        continuum.SpectralSystem(np.array([0.0, 1.0, 2.0]), quantum.random_density(rng, 2), quantum.sharp_basis_povm(2))
    with pytest.raises(ValueError):
        continuum.SpectralSystem(np.array([0.0, np.inf]), quantum.random_density(rng, 2), quantum.sharp_basis_povm(2))


def test_from_hamiltonian_rotates_into_energy_basis(rng):
    h = opalg.random_hermitian(rng, 3)
    rho = quantum.random_density(rng, 3)
    povm = quantum.random_povm(rng, 3, 2)
    sys = continuum.SpectralSystem.from_hamiltonian(h, rho, povm)
    v = opalg.hermitian_eig(h).eigenvectors
    assert np.allclose(v @ sys.rho.matrix @ v.conj().T, rho.matrix, atol=1e-12)
    assert np.allclose(sys.energies, np.linalg.eigvalsh(h))


def test_trapezoid_adaptive():
    assert abs(continuum.trapezoid_adaptive(np.sin, 0, np.pi) - 2) < 1e-10
    assert abs(continuum.trapezoid_adaptive(lambda x: np.exp(-x * x), -10, 10) - np.sqrt(np.pi)) < 1e-12
    assert continuum.trapezoid_adaptive(np.sin, 1.0, 1.0) == 0.0


@pytest.mark.parametrize("lam", [1.0, 7.0, 64.0])
@pytest.mark.parametrize("s", [0.0, 0.5, 2.0])
def test_identity_effect_gives_one(lam, s, profs):
    f_c, f_r, h = profs
    rng = np.random.default_rng(1)
    sys = continuum.SpectralSystem(np.array([0.0, 0.8, 1.9]), quantum.random_density(rng, 3), quantum.validate_povm([np.eye(3)]))
    assert abs(continuum.conditional_ratio(sys, 0, h, s, f_c, f_r, lam) - 1) < 1e-10


def test_diagonal_case_is_lambda_independent(profs):
    f_c, f_r, h = profs
    rho = quantum.validate_state(np.diag([0.3, 0.7]))
    povm = quantum.validate_povm([np.diag([0.9, 0.2]), np.diag([0.1, 0.8])])
    sys = continuum.SpectralSystem(np.array([0.0, 1.0]), rho, povm)
    for lam in (1.0, 16.0):
        assert abs(continuum.conditional_ratio(sys, 0, h, 0.5, f_c, f_r, lam) - (0.3 * 0.9 + 0.7 * 0.2)) < 1e-10


@pytest.mark.parametrize("lam", [1.0, 4.0, 16.0])
@pytest.mark.parametrize("s", [0.0, 0.5, 2.0])
def test_gaussian_closed_form(lam, s, profs):
    f_c, f_r, h = profs
    sys = two_level(3)
    for k in sys.povm.outcomes:
        ref = gaussian_ratio(sys, k, s, 0.05, 1.0, 0.1, lam)
        assert abs(continuum.conditional_ratio(sys, k, h, s, f_c, f_r, lam) - ref) < 1e-10
        assert abs(continuum.time_domain_ratio(sys, k, h, s, f_c, f_r, lam) - ref) < 1e-8


@given(st.integers(0, 1000), st.sampled_from([1.0, 4.0, 16.0]), st.sampled_from([0.0, 0.5, 2.0]))
def test_cross_oracle(seed, lam, s):
    f_c, f_r, h = profiles.gaussian(0.05), profiles.gaussian(1.0), profiles.gaussian(0.1, role="window")
    sys = two_level(seed)
    fd = continuum.conditional_ratio(sys, 0, h, s, f_c, f_r, lam)
    td = continuum.time_domain_ratio(sys, 0, h, s, f_c, f_r, lam)
    assert abs(fd - td) < 1e-6


def test_cross_oracle_bump_profiles():
    sys = two_level(8)
    f_c, f_r, h = profiles.bump(0.1), profiles.bump(1.5), profiles.bump(0.2, role="window")
    for lam, s in [(1.0, 0.0), (4.0, 0.5)]:
        fd = continuum.conditional_ratio(sys, 1, h, s, f_c, f_r, lam)
        td = continuum.time_domain_ratio(sys, 1, h, s, f_c, f_r, lam)
        assert abs(fd - td) < 1e-6


@pytest.mark.parametrize("s", [0.0, 0.5, 2.0])
def test_limit_convergence(s, profs):
    f_c, f_r, h = profs
    sys = two_level(0)
    limit = continuum.limit_conditional(sys, 0, h, s, f_c)
    errors = [abs(continuum.conditional_ratio(sys, 0, h, s, f_c, f_r, lam) - limit) for lam in LAMBDAS]
    for a, b in zip(errors, errors[1:]):
        assert b <= 1.1 * a or b < 1e-12
    assert errors[-1] < 1e-3


def test_limit_matches_closed_form_limit(profs):
    f_c, f_r, h = profs
    sys = two_level(2)
    # lam -> infinity in the gaussian closed form
    assert abs(continuum.limit_conditional(sys, 1, h, 0.5, f_c) - gaussian_ratio(sys, 1, 0.5, 0.05, 1.0, 0.1, 1e9)) < 1e-10


def test_limit_trivial_case(profs):
    f_c, _, h = profs
    rho = quantum.validate_state(np.diag([0.4, 0.6]))
    povm = quantum.validate_povm([np.diag([1.0, 0.25]), np.diag([0.0, 0.75])])
    sys = continuum.SpectralSystem(np.array([0.0, 1.0]), rho, povm)
    assert abs(continuum.limit_conditional(sys, 0, h, 0.0, f_c) - (0.4 + 0.15)) < 1e-12


def test_effective_operator_flat_filter():
    sys = two_level(4)
    a_bar = continuum.effective_operator(sys, 0, None, profiles.gaussian(1e-4))
    assert opalg.frobenius(a_bar - sys.povm[0]) < 1e-6


def test_effective_operator_gaussian_attenuation():
    sys = two_level(5)
    a_bar = continuum.effective_operator(sys, 0, None, profiles.gaussian(1.0))
    a = sys.povm[0]
    assert abs(a_bar[0, 1] - np.exp(-0.5) * a[0, 1]) < 1e-12
    assert abs(a_bar[1, 0] - np.exp(-0.5) * a[1, 0]) < 1e-12
    assert np.allclose(np.diag(a_bar), np.diag(a), atol=1e-15)


@given(st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_effective_operator_properties(sig_c, sig_h):
    rng = np.random.default_rng(9)
    sys = continuum.SpectralSystem(np.array([-0.5, 0.2, 1.7]), quantum.random_density(rng, 3), quantum.random_povm(rng, 3, 3))
    f_c, h = profiles.gaussian(sig_c), profiles.gaussian(sig_h, role="window")
    total = sum(continuum.effective_operator(sys, k, None, f_c) for k in sys.povm.outcomes)
    assert opalg.frobenius(total - np.eye(3)) < 1e-10
    for k in sys.povm.outcomes:
        a_bar = continuum.effective_operator(sys, k, h, f_c)
        assert opalg.hermiticity_defect(a_bar) < 1e-12


def test_effective_operator_diagonal_untouched():
    rho = quantum.maximally_mixed(3)
    povm = quantum.sharp_basis_povm(3)
    sys = continuum.SpectralSystem(np.array([0.0, 1.0, 5.0]), rho, povm)
    for k in povm.outcomes:
        assert np.array_equal(continuum.effective_operator(sys, k, None, profiles.bump(0.7)), povm[k])


def test_degenerate_gaps_have_unit_filter():
    f = continuum.filter_factors([0.3, 0.3, 1.0], profiles.gaussian(2.0), profiles.gaussian(0.5, role="window"))
    assert abs(f[0, 1] - 1) < 1e-15 and abs(f[1, 0] - 1) < 1e-15
    assert abs(f[0, 2]) < 1


def test_filter_zero_at_origin():
    zero = profiles.Profile("table", samples=(0.0, 0.0, 0.0), dt=1.0, role="window")
    with pytest.raises(FilterZeroAtOrigin):
        continuum.filter_factors([0.0, 1.0], profiles.gaussian(1.0), zero)


def test_denominator_vanishes(profs):
    f_c, f_r, _ = profs
    far = profiles.bump(0.1, center=50.0, role="window")
    with pytest.raises(DenominatorVanishes):
        continuum.conditional_ratio(two_level(), 0, far, 0.0, profiles.bump(0.1), profiles.bump(0.5), 1.0)
    with pytest.raises(DenominatorVanishes):
        continuum.time_domain_ratio(two_level(), 0, far, 0.0, profiles.bump(0.1), profiles.bump(0.5), 1.0)


@pytest.mark.parametrize("t0", [0.0, 0.7, 2.0])
def test_narrow_window_reproduces_heisenberg(t0):
    rng = np.random.default_rng(5)
    sys = continuum.SpectralSystem(np.array([0.0, 1.0, 2.3]), quantum.random_density(rng, 3), quantum.random_povm(rng, 3, 2))
    h = profiles.bump(0.02, role="window")
    ratio = continuum.time_domain_ratio(sys, 0, h, t0, profiles.gaussian(0.02), profiles.gaussian(1.0), 64.0)
    ref = np.real(np.trace(sys.rho.matrix @ opalg.heisenberg(sys.povm[0], sys.hamiltonian, t0)))
    assert abs(ratio - ref) < 1e-2


def test_heisenberg_curve_matches_trace():
    sys = two_level(6)
    curve = continuum.heisenberg_curve(sys, 1)
    for t in (0.0, 0.4, -1.3):
        ref = np.real(np.trace(sys.rho.matrix @ opalg.heisenberg(sys.povm[1], sys.hamiltonian, -t)))
        assert abs(curve(t) - ref) < 1e-12
