"""Model Hamiltonians, integral-file import and ground-state solution.

Spin-orbitals are interleaved: orbital ``2*i + s`` is spatial site/level ``i``
with spin ``s`` (0 = alpha, 1 = beta).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    IntegralParseError,
    NonHermitianError,
    NonHermitianIntegralsError,
    Psi0OutsideDegenerateSubspaceError,
)
from .fock import (
    DEFAULT_SECTOR_CAP,
    FockSpace,
    ManyBodyOperator,
    build_one_body,
    build_two_body,
    enumerate_sector,
    one_body_product,
)

DEFAULT_TOL_DEG = 1e-8


@dataclass
class ModelSpec:
    kind: str
    sites: int = 2
    t: float = 1.0
    u: float = 0.0
    periodic: bool = False
    electrons: Optional[int] = None
    levels: tuple = (0.0, 0.0)
    g: float = 0.0
    exchange: float = 0.0
    path: Optional[str] = None
    tol_deg: float = DEFAULT_TOL_DEG

    def __post_init__(self):
        if self.kind not in ("hubbard_chain", "pairing", "integral_file"):
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.tol_deg <= 0:
            raise ConfigError("tol_deg must be positive")
        if self.kind == "hubbard_chain" and self.sites < 2:
            raise ConfigError("hubbard_chain needs at least 2 sites")
        if self.kind == "integral_file" and not self.path:
            raise ConfigError("integral_file model needs a path")


def build_model(spec: ModelSpec, cap: int = DEFAULT_SECTOR_CAP) -> ManyBodyOperator:
    if spec.kind == "hubbard_chain":
        n = spec.sites if spec.electrons is None else spec.electrons
        return build_hubbard(spec.sites, spec.t, spec.u, n, periodic=spec.periodic, cap=cap)
    if spec.kind == "pairing":
        n = 2 if spec.electrons is None else spec.electrons
        return build_pairing(spec.levels, spec.g, spec.exchange, n, cap=cap)
    return load_integrals(spec.path, cap=cap)


def hubbard_integrals(sites: int, t: float, u: float, periodic: bool = False):
    """Spin-orbital one-body matrix and two-body tensor of a Hubbard chain.

    A periodic chain of two sites is identical to the open dimer (the wrap
    bond is the same bond and is not counted twice).
    """
    m = 2 * sites
    h = np.zeros((m, m))
    bonds = [(i, i + 1) for i in range(sites - 1)]
    if periodic and sites > 2:
        bonds.append((sites - 1, 0))
    for i, j in bonds:
        for s in (0, 1):
            h[2 * i + s, 2 * j + s] -= t
            h[2 * j + s, 2 * i + s] -= t
    w = np.zeros((m, m, m, m))
    for i in range(sites):
        a, b = 2 * i, 2 * i + 1
        w[a, b, a, b] = u
        w[b, a, b, a] = u
    return h, w


def build_hubbard(sites: int, t: float, u: float, electrons: int, periodic: bool = False,
                  cap: int = DEFAULT_SECTOR_CAP) -> ManyBodyOperator:
    """-t sum_<ij>s (a+_is a_js + h.c.) + U sum_i n_i,up n_i,dn"""
    if sites < 2:
        raise ValueError("need at least 2 sites")
    space = enumerate_sector(2 * sites, electrons, cap=cap)
    h, w = hubbard_integrals(sites, t, u, periodic)
    mat = build_one_body(space, h).matrix + build_two_body(space, w).matrix
    kind = "ring" if periodic else "chain"
    return ManyBodyOperator(f"hubbard_{kind}(L={sites},t={t},U={u},N={electrons})", mat,
                            one_body=h, space=space)


def _local_spin_matrices(m, level):
    """Spin-orbital one-body matrices of S^z, S^+, S^- on a single level."""
    a, b = 2 * level, 2 * level + 1
    sz = np.zeros((m, m))
    sz[a, a], sz[b, b] = 0.5, -0.5
    sp = np.zeros((m, m))
    sp[a, b] = 1.0
    return sz, sp, sp.T.copy()


def build_pairing(levels, g: float, exchange: float, electrons: int,
                  cap: int = DEFAULT_SECTOR_CAP) -> ManyBodyOperator:
    """Reduced pairing model with ferromagnetic inter-level exchange.

    H = sum_is e_i n_is - g sum_ij P+_i P_j - J sum_{i<j} S_i.S_j,
    with P+_i = a+_i,up a+_i,dn.  Large J gives a triplet ground state; J = 0
    and g > 0 with equal levels gives a paired singlet with equal natural
    amplitudes.
    """
    levels = np.asarray(levels, dtype=float)
    n_lev = levels.size
    m = 2 * n_lev
    space = enumerate_sector(m, electrons, cap=cap)
    h = np.diag(np.repeat(levels, 2)).astype(complex)
    w = np.zeros((m, m, m, m), dtype=complex)
    for i in range(n_lev):
        for j in range(n_lev):
            # P+_i P_j = a+_i,up a+_i,dn a_j,dn a_j,up
            w[2 * i, 2 * i + 1, 2 * j, 2 * j + 1] += -g
            w[2 * i + 1, 2 * i, 2 * j + 1, 2 * j] += -g
    for i in range(n_lev):
        szi, spi, smi = _local_spin_matrices(m, i)
        for j in range(i + 1, n_lev):
            szj, spj, smj = _local_spin_matrices(m, j)
            for x, y, c in ((szi, szj, 1.0), (spi, smj, 0.5), (smi, spj, 0.5)):
                h1, w2 = one_body_product(x, y)
                h += -exchange * c * h1
                w += -exchange * c * w2
    mat = build_one_body(space, h).matrix + build_two_body(space, w).matrix
    return ManyBodyOperator(f"pairing(levels={levels.tolist()},g={g},J={exchange},N={electrons})",
                            mat, one_body=h, space=space)


def parse_integral_text(text: str, source: str = "<string>"):
    """Parse the line-oriented integral format.

    Returns ``(n_orb, n_elec, core, h, eri)`` with ``eri[p,q,r,s] = (pq|rs)``
    in chemists' notation over spin-orbitals.  Each listed integral implies
    its permutational partners; contradicting partners are rejected.
    """
    header = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            tok = line.split()
            if len(tok) != 4 or tok[0].upper() != "NORB" or tok[2].upper() != "NELEC":
                raise IntegralParseError("expected header 'NORB <M> NELEC <N>'", lineno)
            try:
                header = (int(tok[1]), int(tok[3]))
            except ValueError:
                raise IntegralParseError("non-integer NORB/NELEC", lineno) from None
            if header[0] <= 0 or not 0 <= header[1] <= header[0]:
                raise IntegralParseError("invalid NORB/NELEC values", lineno)
            continue
        tok = line.split()
        if len(tok) != 5:
            raise IntegralParseError(f"expected 'p q r s value', got {len(tok)} fields", lineno)
        try:
            idx = [int(x) for x in tok[:4]]
            value = float(tok[4])
        except ValueError:
            raise IntegralParseError("could not parse indices or value", lineno) from None
        if any(i < 0 or i > header[0] for i in idx):
            raise IntegralParseError(f"index out of range 0..{header[0]}", lineno)
        entries.append((lineno, idx, value))
    if header is None:
        raise IntegralParseError(f"{source}: missing header", None)

    m, n = header
    core = 0.0
    h = np.full((m, m), np.nan)
    eri = np.full((m, m, m, m), np.nan)

    def put(arr, keys, value, lineno):
        for key in keys:
            old = arr[key]
            if not np.isnan(old) and abs(old - value) > 1e-12 * max(1.0, abs(value)):
                raise NonHermitianIntegralsError(
                    f"line {lineno}: integral {tuple(i + 1 for i in key)} = {value} contradicts "
                    f"previously implied value {old}")
            arr[key] = value

    for lineno, (p, q, r, s), value in entries:
        if q == r == s == 0:
            core += value
        elif r == s == 0:
            if p == 0:
                raise IntegralParseError("one-electron integral needs nonzero p and q", lineno)
            p, q = p - 1, q - 1
            put(h, [(p, q), (q, p)], value, lineno)
        else:
            if 0 in (p, q, r, s):
                raise IntegralParseError("two-electron integral needs four nonzero indices", lineno)
            p, q, r, s = p - 1, q - 1, r - 1, s - 1
            perms = {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                     (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}
            put(eri, list(perms), value, lineno)
    return m, n, core, np.nan_to_num(h), np.nan_to_num(eri)


def load_integrals(path, cap: int = DEFAULT_SECTOR_CAP) -> ManyBodyOperator:
    """Hamiltonian from an integral file (see :func:`parse_integral_text`)."""
    with open(path) as fh:
        text = fh.read()
    m, n, core, h, eri = parse_integral_text(text, str(path))
    space = enumerate_sector(m, n, cap=cap)
    # 1/2 sum (pq|rs) a+_p a+_r a_s a_q
    w = eri.transpose(0, 2, 1, 3)
    mat = build_one_body(space, h).matrix + build_two_body(space, w).matrix
    mat = mat + core * np.eye(space.dim)
    return ManyBodyOperator(f"integrals({path})", mat, one_body=h, space=space)


@dataclass(eq=False)
class GroundStateSolution:
    energies: np.ndarray
    vectors: np.ndarray
    D: int
    tol_deg: float
    space: Optional[FockSpace] = field(default=None, repr=False)

    @property
    def omega(self) -> np.ndarray:
        return self.energies - self.energies[0]

    @property
    def psi0(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def e0(self) -> float:
        return float(self.energies[0])

    @property
    def degenerate_vectors(self) -> np.ndarray:
        return self.vectors[:, :self.D]


def solve_ground(H, tol_deg: float = DEFAULT_TOL_DEG, psi0=None, resolve=None) -> GroundStateSolution:
    """Full eigendecomposition with degeneracy detection and initial-state choice.

    ``psi0`` is either a coefficient vector over the ``D`` degenerate columns or
    a full state vector lying in the degenerate subspace.  ``resolve`` is an
    optional hermitian operator diagonalized inside the degenerate subspace
    first, so the columns (and ``psi0`` coefficients) refer to its
    eigenvectors in ascending order.  The returned ``vectors[:, 0]`` is the
    normalized initial state; the remaining degenerate columns complete an
    orthonormal basis of the ground manifold.
    """
    space = getattr(H, "space", None)
    mat = np.asarray(getattr(H, "matrix", H), dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"Hamiltonian must be square, got {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > 1e-12 * scale:
        raise NonHermitianError("Hamiltonian is not hermitian")
    energies, vectors = np.linalg.eigh(mat)
    threshold = tol_deg * (abs(energies[0]) + 1.0)
    D = int(np.count_nonzero(energies - energies[0] < threshold))
    # exact degeneracies share one energy value
    energies[:D] = energies[0]
    deg = vectors[:, :D]

    if resolve is not None:
        r = np.asarray(getattr(resolve, "matrix", resolve), dtype=complex)
        vals, rot = np.linalg.eigh(deg.conj().T @ r @ deg)
        deg = deg @ rot

    if psi0 is None:
        target = deg[:, 0]
    else:
        psi0 = np.asarray(psi0, dtype=complex).ravel()
        if psi0.size == D:
            coeffs = psi0
        elif psi0.size == mat.shape[0]:
            coeffs = deg.conj().T @ psi0
            if np.linalg.norm(deg @ coeffs - psi0) > 1e-10 * max(np.linalg.norm(psi0), 1e-300):
                raise Psi0OutsideDegenerateSubspaceError("psi0 has components outside the ground manifold")
        else:
            raise DimensionMismatchError(f"psi0 has length {psi0.size}; expected {D} or {mat.shape[0]}")
        norm = np.linalg.norm(coeffs)
        if norm == 0:
            raise ValueError("psi0 is the zero vector")
        target = deg @ (coeffs / norm)

    if D > 1:
        coeffs = deg.conj().T @ target
        q, _ = np.linalg.qr(np.column_stack([coeffs, np.eye(D, dtype=complex)]))
        q = q[:, :D]
        q[:, 0] *= np.vdot(q[:, 0], coeffs) / abs(np.vdot(q[:, 0], coeffs))
        deg = deg @ q
        deg[:, 0] = target
    else:
        deg = target[:, None]
    vectors = vectors.copy()
    vectors[:, :D] = deg
    return GroundStateSolution(energies, vectors, D, tol_deg, space=space)
