"""Real profile functions on the time axis and their Fourier transforms.

Two roles are supported: ``"density"`` profiles integrate to one (clock and
reference position distributions), ``"window"`` profiles take values in
[0, 1] (the detector window ``h``). The transform convention is

    f~(w) = (2 pi)^{-1/2} int f(t) exp(+i w t) dt

so a displaced profile ``f(t - s)`` transforms to ``exp(i w s) f~(w)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import GridTooCoarse

SQRT_2PI = np.sqrt(2 * np.pi)
# e^{-72} ~ 5e-32: gaussians are treated as zero beyond 12 sigma
GAUSSIAN_CUTOFF = 12.0
KINDS = ("gaussian", "bump", "table")
ROLES = ("density", "window")


def _bump_shape(x: np.ndarray) -> np.ndarray:
    """``exp(-1/(1 - x^2))`` on ``|x| < 1``, exactly zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    value, _ = integrate.quad(lambda x: np.exp(-1.0 / (1.0 - x * x)), -1.0, 1.0, epsabs=0.0, epsrel=1e-13)
    return value


def _trapezoid_transform(t: np.ndarray, f: np.ndarray, omega: np.ndarray, chunk: int = 512) -> np.ndarray:
    dt = t[1] - t[0]
    w = np.full(t.size, dt)
    w[0] = w[-1] = dt / 2
    wf = w * f
    out = np.empty(omega.size, dtype=np.complex128)
    for i in range(0, omega.size, chunk):
        om = omega[i : i + chunk]
        out[i : i + chunk] = np.exp(1j * np.outer(om, t)) @ wf
    return out / SQRT_2PI


@dataclass(frozen=True)
class Profile:
    """A real function of time used as a clock, reference or window profile.

    Use the :func:`gaussian`, :func:`bump` and :func:`table` constructors.
    For tables, ``samples`` are the values at ``t0 + j * dt``.
    """

    kind: str
    width: float = 1.0
    center: float = 0.0
    role: str = "density"
    samples: tuple[float, ...] | None = None
    dt: float | None = None
    t0: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.role not in ROLES:
            raise ValueError(f"unknown profile role {self.role!r}")
        if self.kind == "table":
            if self.samples is None or self.dt is None or len(self.samples) < 3 or self.dt <= 0:
                raise ValueError("table profile needs >= 3 samples and dt > 0")
            s = np.asarray(self.samples, dtype=float)
            if np.any(s < 0):
                raise ValueError("profile samples must be nonnegative")
            if self.role == "density":
                mass = integrate.trapezoid(s, dx=self.dt)
                if abs(mass - 1.0) > 1e-8:
                    raise ValueError(f"density table integrates to {mass:.12g}, expected 1")
            elif s.max() > 1.0:
                raise ValueError("window samples must lie in [0, 1]")
        elif not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")

    # amplitude that multiplies the unit shape so the role's normalisation holds
    def _amplitude(self) -> float:
        if self.kind == "gaussian":
            return 1.0 / (SQRT_2PI * self.width) if self.role == "density" else 1.0
        if self.kind == "bump":
            return 1.0 / (self.width * _bump_mass()) if self.role == "density" else np.e
        return 1.0

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            x = (t - self.center) / self.width
            return self._amplitude() * np.exp(-0.5 * x * x)
        if self.kind == "bump":
            return self._amplitude() * _bump_shape((t - self.center) / self.width)
        grid = self.grid()
        return np.interp(t, grid, np.asarray(self.samples), left=0.0, right=0.0)

    def grid(self) -> np.ndarray:
        if self.kind != "table":
            raise ValueError("only table profiles have a sample grid")
        return self.t0 + self.dt * np.arange(len(self.samples))

    def support(self) -> tuple[float, float]:
        """Interval outside which the profile is zero (or below 1e-31 relative, for gaussians)."""
        if self.kind == "gaussian":
            r = GAUSSIAN_CUTOFF * self.width
            return (self.center - r, self.center + r)
        if self.kind == "bump":
            return (self.center - self.width, self.center + self.width)
        g = self.grid()
        return (float(g[0]), float(g[-1]))

    def integral(self) -> float:
        if self.role == "density":
            return 1.0
        if self.kind == "gaussian":
            return SQRT_2PI * self.width
        if self.kind == "bump":
            return np.e * self.width * _bump_mass()
        return float(integrate.trapezoid(np.asarray(self.samples), dx=self.dt))

    def fourier(self, omega) -> np.ndarray:
        """Transform ``(2 pi)^{-1/2} int f(t) exp(i omega t) dt`` at the given frequencies.

        Gaussians use the closed form; bumps and tables are integrated with the
        trapezoid rule on their support.

        Raises
        ------
        GridTooCoarse
            For tables, when ``|omega| * dt`` exceeds pi (beyond Nyquist).
        """
        omega = np.asarray(omega, dtype=float)
        flat = omega.reshape(-1)
        if self.kind == "gaussian":
            env = np.exp(-0.5 * (self.width * flat) ** 2 + 1j * flat * self.center)
            out = self._amplitude() * self.width * env
        elif self.kind == "bump":
            top = float(np.max(np.abs(flat))) if flat.size else 0.0
            n = max(2049, int(np.ceil(8 * self.width * top / np.pi)) + 1)
            t = np.linspace(self.center - self.width, self.center + self.width, n)
            out = _trapezoid_transform(t, self(t), flat)
        else:
            if flat.size and np.max(np.abs(flat)) * self.dt > np.pi:
                raise GridTooCoarse(
                    f"|omega| up to {np.max(np.abs(flat)):.4g} exceeds the Nyquist limit {np.pi / self.dt:.4g}"
                )
            out = _trapezoid_transform(self.grid(), np.asarray(self.samples, dtype=float), flat)
        return out.reshape(omega.shape)

    def bandwidth(self, rtol: float = 1e-14) -> float:
        """Frequency beyond which ``|f~|`` stays below ``rtol * |f~(0)|``."""
        if self.kind == "gaussian":
            return np.sqrt(2 * np.log(1 / rtol)) / self.width
        if self.kind == "bump":
            return _bump_bandwidth(max(rtol, 1e-12)) / self.width
        return np.pi / self.dt

    def shifted(self, s: float) -> "Profile":
        """The displaced profile ``t -> f(t - s)``."""
        if self.kind == "table":
            return Profile("table", role=self.role, samples=self.samples, dt=self.dt, t0=self.t0 + s)
        return Profile(self.kind, self.width, self.center + s, self.role)

    def scaled(self, lam: float) -> "Profile":
        """Stretch by ``lam``: ``f(t / lam) / lam`` for densities, ``f(t / lam)`` for windows."""
        if not lam > 0:
            raise ValueError(f"scale must be positive, got {lam}")
        if self.kind == "table":
            div = lam if self.role == "density" else 1.0
            samples = tuple(float(v) / div for v in self.samples)
            return Profile("table", role=self.role, samples=samples, dt=self.dt * lam, t0=self.t0 * lam)
        return Profile(self.kind, self.width * lam, self.center * lam, self.role)


@lru_cache(maxsize=None)
def _bump_bandwidth(rtol: float) -> float:
    """Bandwidth of the unit-width bump, found by scanning its transform magnitude."""
    unit = Profile("bump", 1.0)
    omega = np.arange(0.0, 4000.0, 0.5)
    mag = np.abs(unit.fourier(omega))
    above = np.nonzero(mag > rtol * mag[0])[0]
    return float(omega[above[-1]] + 0.5)


def gaussian(sigma: float, center: float = 0.0, role: str = "density") -> Profile:
    return Profile("gaussian", float(sigma), float(center), role)


def bump(width: float, center: float = 0.0, role: str = "density") -> Profile:
    """Smooth compactly supported profile ``exp(-1/(1 - ((t - c)/w)^2))`` on ``|t - c| < w``."""
    return Profile("bump", float(width), float(center), role)


def table(samples, dt: float, t0: float = 0.0, role: str = "density") -> Profile:
    return Profile("table", role=role, samples=tuple(float(v) for v in samples), dt=float(dt), t0=float(t0))


def fourier(profile: Profile) -> Callable[[np.ndarray], np.ndarray]:
    """Return the transform of ``profile`` as a function of frequency."""
    return profile.fourier


def scale_reference(f_r: Profile, lam: float) -> Profile:
    """Broaden a reference density: ``f_R^lam(t) = f_R(t / lam) / lam``, so ``f~^lam(w) = f~(lam w)``."""
    return f_r.scaled(lam)
