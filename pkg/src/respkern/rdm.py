"""One-body reduced density matrices, natural orbitals and paired expansions.

Conventions: ``gamma[p, q] = <Psi| a+_q a_p |Psi>``.  In a natural-orbital
basis phi_k, ``gamma_op(k, l)`` is the one-body matrix of a+_l a_k.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonHermitianError,
    NonPairedStructureError,
    NotTwoElectronError,
)
from .fock import FockSpace, build_one_body, occupied

TOL_PIN = 1e-8
TOL_DEG = 1e-8
ACTION_TOL = 1e-10


def compute_1rdm(psi, space: FockSpace) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (space.dim,):
        raise DimensionMismatchError(f"state has shape {psi.shape}, sector dimension is {space.dim}")
    rows, cols, cre, ann, sgn = space.one_body_table
    gamma = np.zeros((space.n_orbitals, space.n_orbitals), dtype=complex)
    np.add.at(gamma, (ann, cre), psi[rows].conj() * sgn * psi[cols])
    return gamma


def _fix_phases(vectors):
    """Make the largest-magnitude entry of each column real and positive."""
    idx = np.argmax(np.abs(vectors) > np.abs(vectors).max(axis=0) * (1 - 1e-9), axis=0)
    ph = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(ph) / ph)


@dataclass(eq=False)
class NaturalSpectrum:
    occupations: np.ndarray  # descending
    orbitals: np.ndarray  # columns are NOs in the site/spin-orbital basis
    pinned1: list
    pinned0: list
    fractional: list
    clusters: list  # runs of degenerate occupations

    def to_no_basis(self, u) -> np.ndarray:
        return self.orbitals.conj().T @ np.asarray(u) @ self.orbitals

    def from_no_basis(self, u_no) -> np.ndarray:
        return self.orbitals @ np.asarray(u_no) @ self.orbitals.conj().T

    def gamma_op(self, k: int, l: int) -> np.ndarray:
        """One-body matrix of a+_l a_k in the NO basis (site coefficients)."""
        return np.outer(self.orbitals[:, l], self.orbitals[:, k].conj())


def natural_orbitals(gamma, tol_pin: float = TOL_PIN, tol_deg: float = TOL_DEG) -> NaturalSpectrum:
    gamma = np.asarray(gamma, dtype=complex)
    if np.max(np.abs(gamma - gamma.conj().T), initial=0.0) > 1e-10:
        raise NonHermitianError("1RDM is not hermitian")
    occ, vec = np.linalg.eigh(gamma)
    order = np.argsort(-occ, kind="stable")
    occ, vec = occ[order], _fix_phases(vec[:, order])
    pinned1 = [k for k, n in enumerate(occ) if abs(n - 1) < tol_pin]
    pinned0 = [k for k, n in enumerate(occ) if abs(n) < tol_pin]
    fractional = [k for k in range(occ.size) if k not in pinned1 and k not in pinned0]
    clusters = []
    for k in range(occ.size):
        if clusters and abs(occ[clusters[-1][-1]] - occ[k]) < tol_deg:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    return NaturalSpectrum(occ, vec, pinned1, pinned0, fractional, clusters)


@dataclass
class GammaAction:
    k: int
    l: int
    case: str  # "zero", "identity", or "general"
    residual: float  # deviation from the predicted zero/identity action
    eigenvalue: Optional[complex]  # set when gamma_kl Psi0 is parallel to Psi0
    components: Optional[np.ndarray] = field(default=None, repr=False)


def gamma_action_classify(gs, nos: NaturalSpectrum, space: FockSpace = None, tol_pin: float = TOL_PIN) -> list:
    """Act with every NO-basis a+_l a_k on Psi0 and classify the result.

    Pinned cases are checked against their exact prediction: zero when
    n_k = 0 or (n_l = 1, k != l), Psi0 itself when n_l = 1 and k = l.  Other
    actions are decomposed into eigenstate components.
    """
    space = space if space is not None else gs.space
    psi0 = gs.psi0
    n = nos.occupations
    out = []
    for k in range(n.size):
        for l in range(n.size):
            v = build_one_body(space, nos.gamma_op(k, l)).matrix @ psi0
            ov = np.vdot(psi0, v)
            eig_res = np.linalg.norm(v - ov * psi0)
            eigenvalue = complex(ov) if eig_res < 1e-10 else None
            if abs(n[k]) < tol_pin or (abs(n[l] - 1) < tol_pin and k != l):
                out.append(GammaAction(k, l, "zero", float(np.linalg.norm(v)), eigenvalue))
            elif abs(n[l] - 1) < tol_pin and k == l:
                out.append(GammaAction(k, l, "identity", float(np.linalg.norm(v - psi0)), eigenvalue))
            else:
                comps = gs.vectors.conj().T @ v
                out.append(GammaAction(k, l, "general", float(np.linalg.norm(gs.vectors @ comps - v)),
                                       eigenvalue, comps))
    return out


@dataclass(eq=False)
class TwoElectronExpansion:
    """Psi = sum_k c_k a+_k a+_kbar |vac> over paired natural orbitals.

    ``orbitals[:, 2k]`` and ``orbitals[:, 2k+1]`` are the partners k and kbar.
    """

    amplitudes: np.ndarray
    orbitals: np.ndarray
    state: np.ndarray = field(repr=False)
    space: FockSpace = field(repr=False)
    reconstruction_error: float = 0.0

    @property
    def occupations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def pairing(self) -> list:
        return [(2 * k, 2 * k + 1) for k in range(self.amplitudes.size)]

    def relative_phase(self, k: int, l: int) -> complex:
        """exp(i alpha_kl) := c_k / c_l (unit modulus only for degenerate pairs)."""
        return complex(self.amplitudes[k] / self.amplitudes[l])

    def gamma_op(self, a: int, b: int) -> np.ndarray:
        """a+_b a_a in the paired-orbital basis (orbital column indices)."""
        return np.outer(self.orbitals[:, b], self.orbitals[:, a].conj())


def _pair_matrix(psi, space):
    m = space.n_orbitals
    a = np.zeros((m, m), dtype=complex)
    for det, c in zip(space.dets, psi):
        p, q = occupied(int(det))
        a[p, q] = c
        a[q, p] = -c
    return a


def _pair_state(orbitals, amplitudes, space):
    """Determinant coefficients of sum_k c_k a+_k a+_kbar |vac>."""
    u, v = orbitals[:, 0::2], orbitals[:, 1::2]
    amp = (u * amplitudes) @ v.T
    amp = amp - amp.T
    out = np.empty(space.dim, dtype=complex)
    for i, det in enumerate(space.dets):
        p, q = occupied(int(det))
        out[i] = amp[p, q]
    return out


def _key(vec):
    return int(np.argmax(np.abs(vec) > np.abs(vec).max() * (1 - 1e-9)))


def two_electron_expansion(psi, space: FockSpace, tol_occ: float = 1e-12, tol: float = 1e-9,
                           tol_deg: float = TOL_DEG) -> TwoElectronExpansion:
    """Natural-amplitude expansion of a two-electron state.

    Writing Psi = 1/2 sum_pq A_pq a+_p a+_q, the partner of a natural orbital
    u is proportional to A conj(u) and has the same occupation, so pairs are
    peeled off one occupation cluster at a time.  Orbital phases follow the
    natural-orbital convention (largest entry real positive); the
    largest-amplitude coefficient is then made real positive.
    """
    if space.n_particles != 2:
        raise NotTwoElectronError(f"state has {space.n_particles} electrons, need 2")
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    a = _pair_matrix(psi, space)
    occ, vec = np.linalg.eigh(a @ a.conj().T)
    order = np.argsort(-occ, kind="stable")
    occ, vec = occ[order], _fix_phases(vec[:, order])

    clusters = []
    for k in range(occ.size):
        if occ[k] < tol_occ:
            break
        if clusters and abs(occ[clusters[-1][-1]] - occ[k]) < tol_deg:
            clusters[-1].append(k)
        else:
            clusters.append([k])

    cols, amps = [], []
    for cl in clusters:
        rest = vec[:, cl]
        while rest.shape[1] > 0:
            u = rest[:, 0]
            partner = -a @ u.conj()
            v = _fix_phases((partner / np.linalg.norm(partner))[:, None])[:, 0]
            if _key(v) < _key(u):
                u = v
                partner = -a @ u.conj()
                v = _fix_phases((partner / np.linalg.norm(partner))[:, None])[:, 0]
            cols += [u, v]
            amps.append(np.vdot(v, partner))
            proj = rest - np.outer(u, u.conj() @ rest) - np.outer(v, v.conj() @ rest)
            left, sv, _ = np.linalg.svd(proj, full_matrices=False)
            rest = left[:, sv > 0.5]
    if not amps:
        raise NonPairedStructureError("state has no occupied natural orbitals")
    orbitals = np.column_stack(cols)
    amps = np.array(amps)
    big = int(np.argmax(np.abs(amps)))
    phase = amps[big] / abs(amps[big])
    err = float(np.linalg.norm(psi - _pair_state(orbitals, amps, space)))
    if err > tol:
        raise NonPairedStructureError(f"paired reconstruction error {err:.3e} exceeds {tol:.1e}")
    # amplitudes are quoted up to the global phase of the state
    return TwoElectronExpansion(amps / phase, orbitals, psi, space, err)


@dataclass
class KernelOperator:
    label: str
    u: np.ndarray  # one-body matrix in the site/spin-orbital basis
    action_norm: float


def _checked(exp: TwoElectronExpansion, label, u, verify=True):
    norm = float(np.linalg.norm(build_one_body(exp.space, u).matrix @ exp.state))
    if verify and norm > ACTION_TOL:
        raise RuntimeError(f"{label}: |L Psi0| = {norm:.3e}, expected zero")
    return KernelOperator(label, u, norm)


def pair_ops(exp: TwoElectronExpansion, k: int) -> list:
    """The three hermitian operators of pair k that annihilate Psi0."""
    a, b = 2 * k, 2 * k + 1
    g_ab, g_ba = exp.gamma_op(a, b), exp.gamma_op(b, a)
    return [
        _checked(exp, f"pairX({k})", g_ab + g_ba),
        _checked(exp, f"pairY({k})", 1j * (g_ab - g_ba)),
        _checked(exp, f"pairZ({k})", exp.gamma_op(a, a) - exp.gamma_op(b, b)),
    ]


def phase_locked_ops(exp: TwoElectronExpansion, k1: int, k2: int, verify: bool = True) -> list:
    """Cross-pair potentials locked to the relative phase of c_k1 / c_k2.

    Built with the unit phase of c_k1/c_k2.  They annihilate Psi0 only when
    |c_k1| = |c_k2|; pass ``verify=False`` to construct them regardless.
    """
    one, onebar, two, twobar = 2 * k1, 2 * k1 + 1, 2 * k2, 2 * k2 + 1
    r = exp.relative_phase(k1, k2)
    e = r / abs(r)
    g = exp.gamma_op
    out = []
    for v, tag in ((1.0, "re"), (1j, "im")):
        u1 = v * (g(one, two) - e * g(twobar, onebar)) + np.conj(v) * (g(two, one) - np.conj(e) * g(onebar, twobar))
        out.append(_checked(exp, f"lockA_{tag}({k1},{k2})", u1, verify))
    for v, tag in ((1.0, "re"), (1j, "im")):
        u2 = v * (g(one, twobar) + e * g(two, onebar)) + np.conj(v) * (g(twobar, one) + np.conj(e) * g(onebar, two))
        out.append(_checked(exp, f"lockB_{tag}({k1},{k2})", u2, verify))
    return out


def unlocked_cross_pair_op(exp: TwoElectronExpansion, k1: int, k2: int, v: complex = 1.0) -> np.ndarray:
    """v a+_k2 a_k1 + h.c. without the compensating barred term."""
    u = v * exp.gamma_op(2 * k1, 2 * k2)
    return u + u.conj().T


def build_pair_kernel_ops(exp: TwoElectronExpansion, tol_deg: float = TOL_DEG) -> list:
    """All analytically known kernel potentials of a two-electron ground state."""
    out = []
    n = exp.amplitudes.size
    for k in range(n):
        out += pair_ops(exp, k)
    mod = np.abs(exp.amplitudes)
    for k1 in range(n):
        for k2 in range(k1 + 1, n):
            if abs(mod[k1] - mod[k2]) < tol_deg:
                locked = phase_locked_ops(exp, k1, k2, verify=False)
                # nearly equal amplitudes pass tol_deg but need not annihilate Psi0
                if max(op.action_norm for op in locked) <= ACTION_TOL:
                    out += locked
    return out


@dataclass
class OccupationCheck:
    max_residual: float
    passed: bool
    residuals: np.ndarray = field(repr=False)


def occupation_condition_check(u, nos: NaturalSpectrum, tol: float = 1e-8, basis: str = "site") -> OccupationCheck:
    """max_kl |(n_l - n_k) u_kl| in the NO basis.

    Occupations inside one degenerate cluster are replaced by the cluster
    mean, so couplings within a cluster give exactly zero.
    """
    u_no = nos.to_no_basis(u) if basis == "site" else np.asarray(u)
    n = nos.occupations.copy()
    for cl in nos.clusters:
        n[cl] = n[cl].mean()
    res = np.abs((n[None, :] - n[:, None]) * u_no)
    mx = float(res.max(initial=0.0))
    return OccupationCheck(mx, mx <= tol, res)
