"""Worked examples: the hydrogenic toy space and the nodal-line divergence."""
from .hydrogen import (
    EXACT,
    EXACT_COMMUTATOR,
    HydrogenKernelCases,
    HydrogenSpace,
    full_space_commutator_2s,
    hydrogen_example_kernels,
    hydrogen_matrix_elements,
    matrix_element,
    unprojected_commutators,
)
from .nodal import (
    DivergenceTable,
    GridWavefunction,
    NodalDemo,
    gaussian_p,
    nodal_demo,
    nodal_potential_divergence,
    strip_integral,
)

__all__ = [
    "EXACT",
    "EXACT_COMMUTATOR",
    "HydrogenKernelCases",
    "HydrogenSpace",
    "full_space_commutator_2s",
    "hydrogen_example_kernels",
    "hydrogen_matrix_elements",
    "matrix_element",
    "unprojected_commutators",
    "DivergenceTable",
    "GridWavefunction",
    "NodalDemo",
    "gaussian_p",
    "nodal_demo",
    "nodal_potential_divergence",
    "strip_integral",
]
