"""Exact decision procedures for expansiveness of matrix semigroup actions."""

from .exact import QMatrix, QPoly, Subspace
from .orbits import ExpansivenessVerdict, SemigroupAction, expansiveness_check, jsr_bounds
from .solenoid import DualModuleAction, lift, regular_chain, solenoid_expansive
from .spectral import DiskProfile, SingleVerdict, circle_root_count, single_expansive, unit_disk_profile
from .torus import irreducibility_check, rational_orbit_oracle, torus_expansive
from .weights import expansive_by_weights, find_expansive_element, weight_decomposition

__all__ = [
    "QMatrix",
    "QPoly",
    "Subspace",
    "DiskProfile",
    "SingleVerdict",
    "circle_root_count",
    "single_expansive",
    "unit_disk_profile",
    "SemigroupAction",
    "ExpansivenessVerdict",
    "expansiveness_check",
    "jsr_bounds",
    "weight_decomposition",
    "expansive_by_weights",
    "find_expansive_element",
    "irreducibility_check",
    "torus_expansive",
    "rational_orbit_oracle",
    "DualModuleAction",
    "regular_chain",
    "lift",
    "solenoid_expansive",
]

__version__ = "0.1.0"
