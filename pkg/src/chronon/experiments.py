"""Experiment builders behind the ``chronon`` command line."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import continuum, opalg, profiles, pw, quantum
from .clock import CyclicClock, period_defect, random_cyclic_hamiltonian
from .config import ExperimentConfig, parse_matrix
from .errors import ConfigError
from .output import ResultRow, line_chart
from .relativise import check_invariance, relativise_clock_povm
from .validation import Check, run_suite

DISCRETE_ATOL = 1e-10
KUCHAR_ATOL = 1e-12
NONSCALAR_MIN = 0.1
LIMIT_ATOL = 1e-3
CROSS_ATOL = 1e-6
MONOTONE_SLACK = 0.10
# errors below this are round-off; their ordering carries no information
NOISE_FLOOR = 1e-12


@dataclass
class Outcome:
    rows: list[ResultRow] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    plot: str | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def build_hamiltonian(cfg: ExperimentConfig, rng: np.random.Generator, cyclic: bool) -> np.ndarray:
    block = cfg.hamiltonian
    if block["kind"] == "diagonal":
        return np.diag(np.asarray(block["levels"], dtype=float)).astype(np.complex128)
    if block["kind"] == "matrix":
        h = parse_matrix(block["entries"], cfg.dim_s)
        if not opalg.is_hermitian(h):
            raise ConfigError("hamiltonian matrix is not Hermitian")
        return h
    if cyclic:
        return random_cyclic_hamiltonian(rng, cfg.dim_s, cfg.d)
    return opalg.random_hermitian(rng, cfg.dim_s)


def build_povm(cfg: ExperimentConfig, rng: np.random.Generator) -> quantum.Povm:
    block = cfg.povm
    if block["kind"] == "sharp-basis":
        return quantum.sharp_basis_povm(cfg.dim_s)
    if block["kind"] == "explicit":
        return quantum.validate_povm([parse_matrix(e, cfg.dim_s) for e in block["effects"]])
    return quantum.random_povm(rng, cfg.dim_s, int(block.get("n_outcomes", 3)))


def build_system_state(cfg: ExperimentConfig, rng: np.random.Generator) -> quantum.DensityState:
    block = cfg.system_state
    if block["kind"] == "basis":
        return quantum.basis_state(cfg.dim_s, int(block.get("index", 0)))
    if block["kind"] == "random-mixed":
        return quantum.random_density(rng, cfg.dim_s)
    return quantum.pure_state(quantum.random_pure_vector(rng, cfg.dim_s))


def build_reference(cfg: ExperimentConfig, clock: CyclicClock) -> np.ndarray:
    block = cfg.reference_state
    if block["kind"] == "fourier":
        return clock.fourier_vector(int(block.get("m", 0)))
    return clock.position_vector(int(block.get("n", 0)))


def build_profile(block: dict, role: str) -> profiles.Profile:
    maker = profiles.gaussian if block["kind"] == "gaussian" else profiles.bump
    return maker(float(block.get("width", 1.0)), float(block.get("center", 0.0)), role=role)


def discrete_demo(cfg: ExperimentConfig) -> Outcome:
    """Conditional statistics of the discrete engine against the Heisenberg prediction."""
    rng = np.random.default_rng(cfg.seed)
    clock = CyclicClock(cfg.d)
    h_s = build_hamiltonian(cfg, rng, cyclic=True)
    povm = build_povm(cfg, rng)
    rho_s = build_system_state(cfg, rng)
    xi = build_reference(cfg, clock)
    c = cfg.clock_state_index % cfg.d

    joint = pw.joint_observable(povm, h_s, clock, clock)
    table = pw.joint_probability(joint, pw.engine_state(rho_s, clock, c, xi))
    ref = pw.heisenberg_prediction(rho_s, povm, h_s, cfg.d, clock_index=c)

    out = Outcome()
    case = f"d={cfg.d};dim_s={cfg.dim_s}"
    worst = 0.0
    for i, k in enumerate(povm.outcomes):
        for n in range(cfg.d):
            if not table.defined[n]:
                continue
            row = ResultRow("discrete-demo", case, float(table.conditional[i, n]), float(ref[i, n]), k=k, n=n)
            worst = max(worst, row.abs_error)
            out.rows.append(row)
    out.checks.append(Check("discrete.max_conditional_error", worst, DISCRETE_ATOL))
    out.notes = {
        "defined_times": [int(n) for n in np.nonzero(table.defined)[0]],
        "period_defect": period_defect(h_s, cfg.d),
    }
    if cfg.plot:
        series = []
        for i, k in enumerate(povm.outcomes):
            ns = [n for n in range(cfg.d) if table.defined[n]]
            series.append((f"P({k}|n)", ns, [float(table.conditional[i, n]) for n in ns]))
        out.plot = line_chart(series, title="Conditional probabilities", xlabel="relative time n", ylabel="P(k|n)")
    return out


def kuchar(cfg: ExperimentConfig) -> Outcome:
    """Orbit averages of position projectors (scalar) versus relativised clock effects (invariant, not scalar)."""
    clock = CyclicClock(cfg.d)
    out = Outcome()
    worst = 0.0
    for n in range(cfg.d):
        _, dist = pw.kuchar_average(clock.position_projector(n), clock)
        out.rows.append(ResultRow("kuchar", "position-projector-average", dist, 0.0, n=n))
        worst = max(worst, dist)
    out.checks.append(Check("kuchar.projector_average_scalar", worst, KUCHAR_ATOL))
    rel = [relativise_clock_povm(clock, clock, n) for n in range(cfg.d)]
    gens = [clock.shift_generator, clock.shift_generator]
    out.checks.append(Check("kuchar.relative_time_invariant", max(check_invariance(z, gens) for z in rel), DISCRETE_ATOL))
    if cfg.d >= 2:
        out.checks.append(
            Check("kuchar.relative_time_nonscalar", min(pw.distance_to_scalar(z.matrix) for z in rel), NONSCALAR_MIN, above=True)
        )
    return out


def _monotone(errors: list[float], slack: float = MONOTONE_SLACK) -> float:
    """Largest violation ratio ``err[i+1] / ((1 + slack) err[i])``; below 1 means monotone within slack."""
    worst = 0.0
    for a, b in zip(errors, errors[1:]):
        if b <= NOISE_FLOOR:
            continue
        worst = max(worst, b / ((1 + slack) * max(a, NOISE_FLOOR)))
    return worst


def continuum_sweep(cfg: ExperimentConfig) -> Outcome:
    """Broad-reference convergence of the continuum conditional probability."""
    rng = np.random.default_rng(cfg.seed)
    h_s = build_hamiltonian(cfg, rng, cyclic=False)
    povm = build_povm(cfg, rng)
    rho = build_system_state(cfg, rng)
    system = continuum.SpectralSystem.from_hamiltonian(h_s, rho, povm)
    f_c = build_profile(cfg.profiles["f_c"], "density")
    f_r = build_profile(cfg.profiles["f_r"], "density")
    h = build_profile(cfg.profiles["h"], "window")
    lams = sorted(cfg.lambda_grid)

    out = Outcome()
    series = []
    worst_final, worst_order, worst_cross = 0.0, 0.0, 0.0
    for s in cfg.displacement_s:
        for k in system.povm.outcomes:
            limit = continuum.limit_conditional(system, k, h, s, f_c)
            errors = []
            for lam in lams:
                ratio = continuum.conditional_ratio(system, k, h, s, f_c, f_r, lam)
                row = ResultRow("continuum-sweep", "limit", ratio, limit, k=k, s=s, lam=lam)
                out.rows.append(row)
                errors.append(row.abs_error)
                if cfg.cross_check:
                    td = continuum.time_domain_ratio(system, k, h, s, f_c, f_r, lam)
                    cross = ResultRow("continuum-sweep", "time-domain", ratio, td, k=k, s=s, lam=lam)
                    out.rows.append(cross)
                    worst_cross = max(worst_cross, cross.abs_error)
            worst_final = max(worst_final, errors[-1])
            worst_order = max(worst_order, _monotone(errors))
            series.append((f"k={k}, s={s:g}", lams, [max(e, 1e-17) for e in errors]))
    out.checks.append(Check(f"continuum.error_at_lambda_{lams[-1]:g}", worst_final, LIMIT_ATOL))
    out.checks.append(Check("continuum.error_monotone_within_slack", worst_order, 1.0))
    if cfg.cross_check:
        out.checks.append(Check("continuum.cross_oracle", worst_cross, CROSS_ATOL))
    out.notes = {"energies": [float(e) for e in system.energies]}
    if cfg.plot:
        out.plot = line_chart(series, title="Distance to broad-reference limit", xlabel="lambda",
                              ylabel="|ratio - limit|", logx=True, logy=True)
    return out


def validate(cfg: ExperimentConfig) -> Outcome:
    checks = run_suite(cfg.d, cfg.dim_s, cfg.seed, bool(cfg.debug.get("corrupt_generator", False)))
    out = Outcome(checks=checks)
    out.rows = [ResultRow("validate", c.name, c.value, c.tolerance if c.above else 0.0) for c in checks]
    return out


RUNNERS = {
    "discrete-demo": discrete_demo,
    "continuum-sweep": continuum_sweep,
    "kuchar": kuchar,
    "validate": validate,
}
