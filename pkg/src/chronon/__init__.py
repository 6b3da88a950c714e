"""Relational quantum clocks: finite cyclic models and a continuum reduction."""

__version__ = "0.1.0"

from .clock import CyclicClock, check_time_covariance, cyclic_hamiltonian, random_cyclic_hamiltonian, shift_action
from .continuum import SpectralSystem, conditional_ratio, limit_conditional, time_domain_ratio
from .pw import JointObservable, ProbabilityTable, conditional, joint_observable, joint_probability
from .quantum import DensityState, Povm
from .relativise import RelativisedObservable, relativise_clock_povm, relativise_system

__all__ = [
    "CyclicClock",
    "DensityState",
    "JointObservable",
    "Povm",
    "ProbabilityTable",
    "RelativisedObservable",
    "SpectralSystem",
    "check_time_covariance",
    "conditional",
    "conditional_ratio",
    "cyclic_hamiltonian",
    "joint_observable",
    "joint_probability",
    "limit_conditional",
    "random_cyclic_hamiltonian",
    "relativise_clock_povm",
    "relativise_system",
    "shift_action",
    "time_domain_ratio",
]
