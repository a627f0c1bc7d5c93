"""Exact diagonalization and response-function kernels for small fermionic systems."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .fock import FockSpace, ManyBodyOperator, build_one_body, build_two_body, enumerate_sector
from .model import GroundStateSolution, ModelSpec, build_hubbard, build_model, build_pairing, load_integrals, solve_ground
from .response import (
    OperatorSet,
    Perturbation,
    ResponseKernelResult,
    TransitionMoments,
    chi_laplace,
    chi_time,
    kernel_by_chi_nullspace,
    kernel_by_conditions,
    power_identity_check,
    transition_moments,
    verify_gs_uniqueness,
)

__all__ = [
    "BACKEND",
    "FockSpace",
    "ManyBodyOperator",
    "build_one_body",
    "build_two_body",
    "enumerate_sector",
    "GroundStateSolution",
    "ModelSpec",
    "build_hubbard",
    "build_model",
    "build_pairing",
    "load_integrals",
    "solve_ground",
    "OperatorSet",
    "Perturbation",
    "ResponseKernelResult",
    "TransitionMoments",
    "chi_laplace",
    "chi_time",
    "kernel_by_chi_nullspace",
    "kernel_by_conditions",
    "power_identity_check",
    "transition_moments",
    "verify_gs_uniqueness",
]
