"""One-body operator library: number, spin, site densities, lattice momentum."""
from dataclasses import dataclass

import numpy as np

from .errors import NonPeriodicLayoutError, OddOrbitalLayoutError
from .fock import FockSpace, ManyBodyOperator, build_one_body


@dataclass(frozen=True)
class SpinLayout:
    """Interleaved spin-1/2 layout: orbital ``2*i + s`` is (site ``i``, spin ``s``)."""

    n_spatial: int

    @classmethod
    def for_orbitals(cls, n_orbitals: int) -> "SpinLayout":
        if n_orbitals % 2:
            raise OddOrbitalLayoutError(f"{n_orbitals} spin-orbitals cannot form a spin-1/2 layout")
        return cls(n_orbitals // 2)

    @property
    def n_orbitals(self) -> int:
        return 2 * self.n_spatial

    def orbital(self, site: int, spin: int) -> int:
        return 2 * site + spin

    def site_spin(self, orbital: int) -> tuple:
        return divmod(orbital, 2)


def _layout(space, layout):
    if layout is None:
        return SpinLayout.for_orbitals(space.n_orbitals)
    if layout.n_orbitals != space.n_orbitals:
        raise OddOrbitalLayoutError("layout does not match the sector's orbital count")
    return layout


def number_op(space: FockSpace) -> ManyBodyOperator:
    return build_one_body(space, np.eye(space.n_orbitals), "N")


def spin_one_body(layout: SpinLayout) -> dict:
    """One-body matrices of S_z, S_+, S_-, S_x, S_y."""
    m = layout.n_orbitals
    sz = np.zeros((m, m), dtype=complex)
    sp = np.zeros((m, m), dtype=complex)
    for i in range(layout.n_spatial):
        a, b = layout.orbital(i, 0), layout.orbital(i, 1)
        sz[a, a], sz[b, b] = 0.5, -0.5
        sp[a, b] = 1.0
    sm = sp.T.copy()
    return {
        "Sz": sz,
        "S+": sp,
        "S-": sm,
        "Sx": 0.5 * (sp + sm),
        "Sy": (sp - sm) / 2j,
    }


def spin_ops(space: FockSpace, layout: SpinLayout = None) -> dict:
    layout = _layout(space, layout)
    return {name: build_one_body(space, u, name) for name, u in spin_one_body(layout).items()}


def total_spin_squared(space: FockSpace, layout: SpinLayout = None) -> np.ndarray:
    ops = spin_ops(space, layout)
    return sum(ops[k].matrix @ ops[k].matrix for k in ("Sx", "Sy", "Sz"))


def site_density_ops(space: FockSpace, layout: SpinLayout = None):
    from .response import OperatorSet

    layout = _layout(space, layout)
    ops = []
    for i in range(layout.n_spatial):
        u = np.zeros((space.n_orbitals,) * 2)
        u[layout.orbital(i, 0), layout.orbital(i, 0)] = 1.0
        u[layout.orbital(i, 1), layout.orbital(i, 1)] = 1.0
        ops.append(build_one_body(space, u, f"n{i}"))
    return OperatorSet(ops)


def hermitian_one_body_basis(n_orbitals: int) -> list:
    """Orthonormal (Frobenius) basis of hermitian M x M matrices with labels.

    Diagonal units, then symmetric and antisymmetric couplings per pair p < q.
    """
    basis = []
    for p in range(n_orbitals):
        u = np.zeros((n_orbitals, n_orbitals), dtype=complex)
        u[p, p] = 1.0
        basis.append((f"E{p}{p}", u))
    r = 1 / np.sqrt(2)
    for p in range(n_orbitals):
        for q in range(p + 1, n_orbitals):
            u = np.zeros((n_orbitals, n_orbitals), dtype=complex)
            u[p, q] = u[q, p] = r
            basis.append((f"X{p}{q}", u))
            u = np.zeros((n_orbitals, n_orbitals), dtype=complex)
            u[p, q], u[q, p] = -1j * r, 1j * r
            basis.append((f"Y{p}{q}", u))
    return basis


def one_body_operator_set(space: FockSpace):
    """The full hermitian one-body (1RDM) operator set, M^2 members."""
    from .response import OperatorSet

    return OperatorSet([build_one_body(space, u, lab) for lab, u in hermitian_one_body_basis(space.n_orbitals)])


def bloch_momenta(n_sites: int) -> np.ndarray:
    """Lattice momenta 2 pi m / L folded into (-pi, pi]."""
    k = 2 * np.pi * np.arange(n_sites) / n_sites
    return np.where(k > np.pi + 1e-12, k - 2 * np.pi, k)


def translation_generator(space: FockSpace, layout: SpinLayout = None, periodic: bool = True) -> ManyBodyOperator:
    """Total lattice momentum sum_k,s k n_ks for a periodic ring.

    Diagonal in the Bloch basis phi_k(j) = exp(i k j)/sqrt(L), so it commutes
    with every translation-invariant one-body Hamiltonian.  With an on-site
    interaction it still commutes except for umklapp processes (total momentum
    is conserved only mod 2 pi), which e.g. mix (pi, pi) into the K = 0 pair
    sector of a 4-site ring; odd rings at N = 2 have no umklapp in K = 0.
    """
    if not periodic:
        raise NonPeriodicLayoutError("lattice momentum requires a periodic ring")
    layout = _layout(space, layout)
    n = layout.n_spatial
    ks = bloch_momenta(n)
    j = np.arange(n)
    bloch = np.exp(1j * np.outer(j, ks)) / np.sqrt(n)
    spatial = bloch @ np.diag(ks) @ bloch.conj().T
    u = np.kron(spatial, np.eye(2))
    return build_one_body(space, u, "P")
