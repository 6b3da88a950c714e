import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from chronon import profiles
from chronon.errors import GridTooCoarse

SQRT_2PI = np.sqrt(2 * np.pi)


def quad_transform(p, omega):
    lo, hi = p.support()
    re = integrate.quad(lambda t: p(t) * np.cos(omega * t), lo, hi, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda t: p(t) * np.sin(omega * t), lo, hi, limit=400, epsabs=1e-13)[0]
    return (re + 1j * im) / SQRT_2PI


@pytest.mark.parametrize("p", [profiles.gaussian(0.7), profiles.bump(1.3), profiles.gaussian(0.2, 0.5)])
def test_density_unit_integral(p):
    lo, hi = p.support()
    assert abs(integrate.quad(p, lo, hi, limit=200)[0] - 1) < 1e-8


def test_bump_vanishes_outside_support():
    p = profiles.bump(0.5, center=1.0)
    t = np.array([0.0, 0.5, 1.5, 2.0, -3.0])
    assert np.all(p(t) == 0.0)
    assert p(1.0) > 0


def test_windows_peak_at_one():
    assert profiles.gaussian(0.3, role="window")(0.0) == pytest.approx(1.0)
    assert profiles.bump(0.3, role="window")(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("omega", [0.0, 1.0, 3.0])
def test_gaussian_transform_matches_quadrature(omega):
    p = profiles.gaussian(0.8)
    closed = np.exp(-0.5 * 0.8**2 * omega**2) / SQRT_2PI
    assert abs(p.fourier(omega) - closed) < 1e-14
    assert abs(p.fourier(omega) - quad_transform(p, omega)) < 1e-10


@pytest.mark.parametrize("omega", [0.0, 1.0, 3.0, 10.0])
def test_bump_transform_matches_quadrature(omega):
    p = profiles.bump(0.9, center=0.2)
    assert abs(p.fourier(omega) - quad_transform(p, omega)) < 1e-10


@pytest.mark.parametrize("p", [profiles.gaussian(1.1), profiles.bump(0.4)])
def test_transform_at_zero(p):
    assert abs(p.fourier(0.0) - 1 / SQRT_2PI) < 1e-10


@pytest.mark.parametrize("make", [profiles.gaussian, profiles.bump])
@given(st.floats(-3, 3), st.floats(-5, 5))
def test_shift_multiplies_transform_by_phase(make, s, omega):
    h = make(0.6, role="window")
    assert abs(h.shifted(s).fourier(omega) - np.exp(1j * omega * s) * h.fourier(omega)) < 1e-10


@pytest.mark.parametrize("make", [profiles.gaussian, profiles.bump])
@given(st.floats(0.1, 10), st.floats(-4, 4))
def test_scaling_rescales_frequency(make, lam, omega):
    f = make(0.7)
    assert abs(profiles.scale_reference(f, lam).fourier(omega) - f.fourier(lam * omega)) < 1e-10


def test_scale_examples():
    g = profiles.gaussian(0.5)
    assert profiles.scale_reference(g, 1.0) == g
    assert profiles.scale_reference(g, 2.0) == profiles.gaussian(1.0)
    t = np.linspace(-20, 20, 4001)
    for lam in (0.5, 3.0):
        assert abs(np.trapezoid(profiles.scale_reference(profiles.bump(1.0), lam)(t), t) - 1) < 1e-8


def test_table_profile_transform_and_nyquist():
    dt = 0.01
    t = np.arange(-6, 6 + dt / 2, dt)
    g = profiles.gaussian(0.5)
    tab = profiles.table(g(t), dt, t0=t[0])
    for omega in (0.0, 1.5, 4.0):
        assert abs(tab.fourier(omega) - g.fourier(omega)) < 1e-8
    with pytest.raises(GridTooCoarse):
        tab.fourier(np.pi / dt * 1.01)


def test_table_validation():
    with pytest.raises(ValueError):
        profiles.table([0.1, 0.2, 0.1], 1.0)  # wrong mass
    with pytest.raises(ValueError):
        profiles.table([0.5, -0.1, 0.5], 1.0)
    with pytest.raises(ValueError):
        profiles.table([0.5, 1.5, 0.5], 1.0, role="window")
    with pytest.raises(ValueError):
        profiles.gaussian(-1.0)


@pytest.mark.parametrize("p", [profiles.gaussian(0.3), profiles.bump(0.3)])
def test_bandwidth_bounds_the_transform(p):
    bw = p.bandwidth(1e-10)
    omega = np.linspace(bw, 3 * bw, 50)
    assert np.max(np.abs(p.fourier(omega))) <= 1e-10 * abs(p.fourier(0.0)) * 1.01
