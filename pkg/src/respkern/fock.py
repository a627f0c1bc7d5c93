"""Fixed-particle-number Fock sectors and second-quantized operators.

Determinants are integer bitstrings: bit ``p`` set means spin-orbital ``p`` is
occupied, and the state is ``a^+_{p1} a^+_{p2} ... |vac>`` with
``p1 < p2 < ...``.  Fermionic signs follow the Jordan-Wigner convention
(count occupied orbitals below the one acted on).
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatchError, SectorTooLargeError

MAX_ORBITALS = 24
DEFAULT_SECTOR_CAP = 50_000

Determinant = int


def occupied(det: Determinant) -> tuple:
    """Occupied orbital indices of ``det`` in ascending order."""
    out = []
    p = 0
    while det:
        if det & 1:
            out.append(p)
        det >>= 1
        p += 1
    return tuple(out)


def det_from_occupied(orbitals) -> Determinant:
    det = 0
    for p in orbitals:
        det |= 1 << p
    return det


def apply_excitation(det: Determinant, create: int, annihilate: int):
    """Apply ``a^+_create a_annihilate`` to ``det``.

    Returns ``(new_det, sign)`` or ``None`` when the result vanishes.
    """
    if not (det >> annihilate) & 1:
        return None
    sign = -1 if bin(det & ((1 << annihilate) - 1)).count("1") % 2 else 1
    det ^= 1 << annihilate
    if (det >> create) & 1:
        return None
    if bin(det & ((1 << create) - 1)).count("1") % 2:
        sign = -sign
    return det | (1 << create), sign


@dataclass(frozen=True, eq=False)
class FockSpace:
    n_orbitals: int
    n_particles: int
    dets: np.ndarray = field(repr=False)

    def __len__(self):
        return self.dets.size

    @property
    def dim(self) -> int:
        return self.dets.size

    def index(self, det: Determinant) -> int:
        i = int(np.searchsorted(self.dets, np.uint64(det)))
        if i >= self.dets.size or int(self.dets[i]) != det:
            raise KeyError(f"determinant {det:#b} not in sector")
        return i

    def basis_state(self, det: Determinant) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(det)] = 1.0
        return v

    @cached_property
    def one_body_table(self):
        """(rows, cols, create, annihilate, signs) for every nonzero a^+_p a_q element."""
        return kernels.one_body_table(self.dets, self.n_orbitals)


def enumerate_sector(n_orbitals: int, n_particles: int, cap: int = DEFAULT_SECTOR_CAP) -> FockSpace:
    """All determinants with ``n_particles`` electrons in ``n_orbitals`` spin-orbitals."""
    if not 0 <= n_particles <= n_orbitals <= MAX_ORBITALS:
        raise ValueError(
            f"need 0 <= n_particles <= n_orbitals <= {MAX_ORBITALS}, "
            f"got ({n_orbitals}, {n_particles})"
        )
    size = comb(n_orbitals, n_particles)
    if size > cap:
        raise SectorTooLargeError(f"sector ({n_orbitals}, {n_particles}) has {size} determinants > cap {cap}")
    dets = sorted(det_from_occupied(c) for c in combinations(range(n_orbitals), n_particles))
    return FockSpace(n_orbitals, n_particles, np.array(dets, dtype=np.uint64))


@dataclass(eq=False)
class ManyBodyOperator:
    """Dense operator in a determinant (or other finite) basis."""

    label: str
    matrix: np.ndarray
    one_body: Optional[np.ndarray] = None
    space: Optional[FockSpace] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def expectation(self, psi: np.ndarray) -> complex:
        return complex(np.vdot(psi, self.matrix @ psi))

    def __matmul__(self, other):
        return self.matrix @ other


def build_one_body(space: FockSpace, u, label: str = "") -> ManyBodyOperator:
    """Matrix of ``sum_pq u[p, q] a^+_p a_q`` on ``space``."""
    u = np.asarray(u, dtype=complex)
    m = space.n_orbitals
    if u.shape != (m, m):
        raise DimensionMismatchError(f"one-body matrix has shape {u.shape}, expected {(m, m)}")
    rows, cols, cre, ann, sgn = space.one_body_table
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    np.add.at(mat, (rows, cols), sgn * u[cre, ann])
    return ManyBodyOperator(label, mat, one_body=u, space=space)


def build_two_body(space: FockSpace, w, label: str = "") -> ManyBodyOperator:
    """Matrix of ``1/2 sum_pqrs w[p,q,r,s] a^+_p a^+_q a_s a_r`` on ``space``."""
    w = np.ascontiguousarray(w, dtype=complex)
    m = space.n_orbitals
    if w.shape != (m, m, m, m):
        raise DimensionMismatchError(f"two-body tensor has shape {w.shape}, expected {(m,) * 4}")
    mat = kernels.two_body_matrix(space.dets, m, w)
    return ManyBodyOperator(label, np.asarray(mat), space=space)


def one_body_product(u, v):
    """Split the product of two one-body operators into one- and two-body parts.

    ``U V = build_one_body(u @ v) + build_two_body(w)`` on any fixed-N sector.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    # a+_p a_q a+_r a_s = delta_qr a+_p a_s + a+_p a+_r a_s a_q
    w = np.einsum("pq,rs->prqs", u, v) + np.einsum("pq,rs->prqs", v, u)
    return u @ v, w
