"""Continuous-time clock and reference, reduced to the system's energy basis.

Clock and reference never appear as operators. Only their position
distributions ``f_C`` and ``f_R``, the detector window ``h`` and the system
spectrum ``{e_n}`` enter. The conditional probability of outcome ``k``, given
that the relative time falls in the window displaced by ``s``, is evaluated in
two independent ways:

* :func:`conditional_ratio` integrates over frequency, using the transforms of
  the profiles;
* :func:`time_domain_ratio` integrates the defining double time integral
  directly.

:func:`limit_conditional` gives the closed-form value for an infinitely broad
reference. It is Heisenberg evolution of the filtered operator from
:func:`effective_operator`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import opalg
from .errors import DenominatorVanishes, DimensionError, FilterZeroAtOrigin, GridTooCoarse, NonRealResult
from .profiles import Profile
from .quantum import DensityState, Povm

DENOMINATOR_ATOL = 1e-12
IMAG_ATOL = 1e-8
QUAD_RTOL = 1e-10
MAX_POINTS = 2**18


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """System state and POVM written in the eigenbasis of ``H_S``."""

    energies: np.ndarray
    rho: DensityState
    povm: Povm

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).reshape(-1)
        if not np.all(np.isfinite(e)):
            raise ValueError("energies must be finite")
        if e.size != self.rho.dim or e.size != self.povm.dim:
            raise DimensionError(f"{e.size} energies but state dim {self.rho.dim}, POVM dim {self.povm.dim}")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @classmethod
    def from_hamiltonian(cls, h, rho: DensityState, povm: Povm) -> "SpectralSystem":
        """Rotate ``rho`` and ``povm`` (given in any basis) into the eigenbasis of ``h``."""
        from .quantum import validate_povm, validate_state

        dec = opalg.hermitian_eig(h)
        v = dec.eigenvectors
        rot = lambda x: opalg.dagger(v) @ x @ v  # noqa: E731
        return cls(dec.eigenvalues, validate_state(rot(rho.matrix)), validate_povm([rot(e) for e in povm.effects], povm.outcomes))

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies).astype(np.complex128)

    def gaps(self) -> np.ndarray:
        """``gaps[m, n] = e_m - e_n``."""
        return self.energies[:, None] - self.energies[None, :]

    def coefficients(self, k: int) -> np.ndarray:
        """``c[m, n] = <e_m|rho|e_n> <e_n|A(k)|e_m>``."""
        return self.rho.matrix * self.povm[k].T


def trapezoid_adaptive(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = QUAD_RTOL,
    n0: int = 64,
    max_points: int = MAX_POINTS,
) -> complex:
    """Trapezoid rule on ``[a, b]``, doubling the grid until two successive results agree.

    Agreement is measured against ``int |func|`` so that integrals which cancel
    to (nearly) zero still terminate.
    """
    if b <= a:
        return 0.0
    n = n0
    x = np.linspace(a, b, n + 1)
    y = func(x)
    prev = np.trapezoid(y, x)
    while True:
        n *= 2
        if n > max_points:
            raise GridTooCoarse(f"trapezoid did not converge on [{a:.4g}, {b:.4g}] with {max_points} points")
        mid = a + (b - a) * (np.arange(n // 2) + 0.5) / (n // 2)
        ym = func(mid)
        # interleave old nodes and new midpoints
        yy = np.empty(n + 1, dtype=np.result_type(y, ym))
        yy[0::2] = y
        yy[1::2] = ym
        y = yy
        h = (b - a) / n
        cur = h * (y.sum() - 0.5 * (y[0] + y[-1]))
        scale = h * np.abs(y).sum()
        if abs(cur - prev) <= rtol * max(scale, 1e-300):
            return complex(cur)
        prev = cur


def frequency_integral(gap: float, s: float, f_c: Profile, f_r: Profile, h: Profile, lam: float, rtol: float = QUAD_RTOL) -> complex:
    """``int dw exp(-i w s) f~_C(w) f~_R(lam (gap - w)) h~(-w)``.

    The integration range is where both ``f~_C h~`` and the reference factor
    (centred on ``gap``, width ``~ 1/lam``) are non-negligible.
    """
    band_ch = min(f_c.bandwidth(), h.bandwidth())
    band_r = f_r.bandwidth() / lam
    lo = max(-band_ch, gap - band_r)
    hi = min(band_ch, gap + band_r)
    if hi <= lo:
        return 0j

    def integrand(w):
        return np.exp(-1j * w * s) * f_c.fourier(w) * f_r.fourier(lam * (gap - w)) * h.fourier(-w)

    return trapezoid_adaptive(integrand, lo, hi, rtol)


def _real(value: complex, what: str) -> float:
    if abs(value.imag) >= IMAG_ATOL:
        raise NonRealResult(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def conditional_ratio(
    sys: SpectralSystem,
    k: int,
    h: Profile,
    s: float,
    f_c: Profile,
    f_r: Profile,
    lam: float,
    rtol: float = QUAD_RTOL,
) -> float:
    """Conditional probability of outcome ``k`` for the window ``h`` displaced by ``s``.

    Frequency-domain evaluation: each energy gap ``e_m - e_n`` contributes
    ``<e_m|rho|e_n><e_n|A(k)|e_m>`` times :func:`frequency_integral`, and the
    denominator is the same integral at zero gap. The reference density is
    broadened by ``lam``.

    Raises
    ------
    DenominatorVanishes
        If the zero-gap integral is below 1e-12 in magnitude.
    NonRealResult
        If the ratio has an imaginary part of 1e-8 or more.
    """
    gaps = sys.gaps()
    coef = sys.coefficients(k)
    cache: dict[float, complex] = {}

    def integral(g: float) -> complex:
        key = round(float(g), 12)
        if key not in cache:
            cache[key] = frequency_integral(key, s, f_c, f_r, h, lam, rtol)
        return cache[key]

    den = np.trace(sys.rho.matrix) * integral(0.0)
    if abs(den) <= DENOMINATOR_ATOL:
        raise DenominatorVanishes(f"denominator {abs(den):.3e} too small")
    num = sum(coef[m, n] * integral(gaps[m, n]) for m in range(gaps.shape[0]) for n in range(gaps.shape[1]) if coef[m, n] != 0)
    return _real(complex(num / den), "conditional ratio")


def heisenberg_curve(sys: SpectralSystem, k: int) -> Callable[[np.ndarray], np.ndarray]:
    """``t -> tr[rho alpha_{-t}(A(k))]``, vectorised over ``t``."""
    gaps = sys.gaps().reshape(-1)
    coef = sys.coefficients(k).reshape(-1)
    keep = coef != 0
    gaps, coef = gaps[keep], coef[keep]

    def curve(t):
        t = np.asarray(t, dtype=float)
        return np.real(np.exp(1j * np.multiply.outer(t, gaps)) @ coef)

    return curve


def time_domain_ratio(
    sys: SpectralSystem,
    k: int,
    h: Profile,
    s: float,
    f_c: Profile,
    f_r: Profile,
    lam: float,
    rtol: float = QUAD_RTOL,
    n0: int = 64,
    max_points: int = 4096,
) -> float:
    """Conditional probability from the double time integral.

    Numerator ``int dtau int dt h(tau - t - s) tr[rho alpha_{-t}(A(k))] f_C(tau) f_R^lam(t)``,
    denominator the same without the trace factor. The integral is taken
    over ``(tau, u)`` with ``u = tau - t`` (unit Jacobian), so that both grid
    directions span the compact supports of ``f_C`` and the displaced window.
    The trapezoid grid is doubled in both directions until numerator and
    denominator are stable to ``rtol``.
    """
    h_s = h.shifted(s)
    f_rl = f_r.scaled(lam)
    curve = heisenberg_curve(sys, k)
    tau_lo, tau_hi = f_c.support()
    u_lo, u_hi = h_s.support()

    def integrate(n: int) -> tuple[float, float, float]:
        tau = np.linspace(tau_lo, tau_hi, n + 1)
        u = np.linspace(u_lo, u_hi, n + 1)
        wt = np.full(n + 1, (tau_hi - tau_lo) / n)
        wu = np.full(n + 1, (u_hi - u_lo) / n)
        wt[[0, -1]] *= 0.5
        wu[[0, -1]] *= 0.5
        t = tau[:, None] - u[None, :]
        base = (wt * f_c(tau))[:, None] * (wu * h_s(u))[None, :] * f_rl(t)
        return float(np.sum(base * curve(t))), float(np.sum(base)), float(np.sum(np.abs(base)))

    n = n0
    num, den, _ = integrate(n)
    while True:
        n *= 2
        if n > max_points:
            raise GridTooCoarse(f"time-domain quadrature did not converge with {max_points} points per axis")
        num2, den2, scale = integrate(n)
        if abs(num2 - num) <= rtol * scale and abs(den2 - den) <= rtol * scale:
            num, den = num2, den2
            break
        num, den = num2, den2
    if abs(den) <= DENOMINATOR_ATOL:
        raise DenominatorVanishes(f"denominator {abs(den):.3e} too small")
    return num / den


def filter_factors(energies, f_c: Profile, h: Profile | None = None) -> np.ndarray:
    """``F[n, m] = f~_C(e_m - e_n) h~(-(e_m - e_n)) / (f~_C(0) h~(0))``; ``h=None`` drops the window factor."""
    e = np.asarray(energies, dtype=float)
    gap = e[None, :] - e[:, None]
    fc0 = complex(f_c.fourier(0.0))
    if abs(fc0) < 1e-14:
        raise FilterZeroAtOrigin("clock profile transform vanishes at zero frequency")
    factor = f_c.fourier(gap) / fc0
    if h is not None:
        h0 = complex(h.fourier(0.0))
        if abs(h0) < 1e-14:
            raise FilterZeroAtOrigin("window transform vanishes at zero frequency")
        factor = factor * h.fourier(-gap) / h0
    return factor


def effective_operator(sys: SpectralSystem, k: int, h: Profile | None, f_c: Profile) -> np.ndarray:
    """Energy-basis ``A(k)`` with off-diagonal elements damped by the clock (and window) transforms.

    Each element ``<e_n|A|e_m>`` is multiplied by :func:`filter_factors`; the
    diagonal is untouched, so high-frequency coherences are cut off according
    to how sharply the clock state is localised.
    """
    return sys.povm[k] * filter_factors(sys.energies, f_c, h)


def limit_conditional(sys: SpectralSystem, k: int, h: Profile | None, s: float, f_c: Profile) -> float:
    """Broad-reference limit ``tr[rho exp(i H s) Abar exp(-i H s)]`` with ``Abar`` from :func:`effective_operator`."""
    a_bar = effective_operator(sys, k, h, f_c)
    evolved = opalg.heisenberg(a_bar, sys.hamiltonian, s)
    return _real(complex(np.trace(sys.rho.matrix @ evolved)), "limit conditional")
