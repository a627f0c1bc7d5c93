"""Lehmann-representation response functions and their kernels.

The response of <Q_i> to real perturbation strengths dv_j(t) coupled to
hermitian operators Q_j is governed by

    chi_ij(t) = i theta(t) sum_K exp(i W_K t) conj(q_i^K) q_j^K + c.c.,
    q_i^K = <Psi0|Q_i|Psi_K>,  W_K = E_K - E_0.

A real weight vector w lies in the kernel iff the combination
L = sum_j w_j Q_j (i) maps Psi0 into the ground manifold and (ii) when the
ground state is degenerate, has vanishing commutator expectation
<Psi0|[Q_i, L]|Psi0> with every Q_i.  :func:`kernel_by_conditions` solves
these two real-linear conditions; :func:`kernel_by_chi_nullspace` is an
independent route through the null space of sampled Laplace transforms.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateGroundStateError,
    DimensionMismatchError,
    EmptyOperatorSetError,
    NonHermitianError,
    NonPositiveSError,
    TooFewSamplesError,
    UnsupportedProfileError,
)

NULLSPACE_RTOL = 1e-8
CANCEL_RTOL = 1e-13
PROFILES = ("exponential", "step", "damped_cosine")


@dataclass(eq=False)
class OperatorSet:
    """Ordered set of hermitian operators sharing one basis."""

    ops: list

    def __post_init__(self):
        self.ops = list(self.ops)
        dims = {op.matrix.shape for op in self.ops}
        if len(dims) > 1:
            raise DimensionMismatchError(f"operators have differing shapes {dims}")
        for op in self.ops:
            if not op.is_hermitian(1e-12):
                raise NonHermitianError(f"operator {op.label!r} is not hermitian")

    def __len__(self):
        return len(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    def __iter__(self):
        return iter(self.ops)

    @property
    def labels(self) -> list:
        return [op.label for op in self.ops]

    @property
    def dim(self) -> int:
        return self.ops[0].dim if self.ops else 0

    def combine(self, weights) -> np.ndarray:
        """Matrix of sum_j w_j Q_j."""
        weights = np.asarray(weights)
        return np.tensordot(weights, np.array([op.matrix for op in self.ops]), axes=1)

    def one_body_of(self, weights) -> np.ndarray:
        return np.tensordot(np.asarray(weights), np.array([op.one_body for op in self.ops]), axes=1)

    def coefficients_of(self, u) -> tuple:
        """Real weights w with sum_j w_j u_j closest to the one-body matrix ``u``.

        Returns ``(w, residual)``; residual is the Frobenius norm of the part
        of ``u`` outside the span of the set.
        """
        if any(op.one_body is None for op in self.ops):
            raise ValueError("operator set lacks one-body provenance")
        basis = np.array([op.one_body.ravel() for op in self.ops]).T
        a = np.vstack([basis.real, basis.imag])
        u = np.asarray(u, dtype=complex).ravel()
        b = np.concatenate([u.real, u.imag])
        w, *_ = np.linalg.lstsq(a, b, rcond=None)
        return w, float(np.linalg.norm(a @ w - b))

    def commutator_expectations(self, psi0) -> np.ndarray:
        """C[i, j] = <psi0|[Q_i, Q_j]|psi0> (purely imaginary, antisymmetric)."""
        acts = np.array([op.matrix @ psi0 for op in self.ops])
        g = acts.conj() @ acts.T  # <Q_i psi|Q_j psi> = <psi|Q_i Q_j|psi>
        return g - g.T


@dataclass(eq=False)
class TransitionMoments:
    q: np.ndarray  # q[i, K] = <Psi0|Q_i|Psi_K>
    omega: np.ndarray
    D: int
    labels: list = field(default_factory=list)

    @property
    def n_ops(self) -> int:
        return self.q.shape[0]


def transition_moments(opset: OperatorSet, gs) -> TransitionMoments:
    if opset.dim != gs.vectors.shape[0]:
        raise DimensionMismatchError(
            f"operator dimension {opset.dim} differs from state dimension {gs.vectors.shape[0]}")
    psi0 = gs.psi0
    q = np.array([(op.matrix @ gs.vectors).T @ psi0.conj() for op in opset]) if len(opset) else \
        np.zeros((0, gs.vectors.shape[1]), dtype=complex)
    return TransitionMoments(q, gs.omega.copy(), gs.D, opset.labels)


def chi_time(tm: TransitionMoments, i: int, j: int, t):
    """chi_ij(t); zero for t < 0, right-continuous at t = 0.

    The Lehmann sum plus its complex conjugate is real, so a real array (or
    float) is returned.
    """
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * np.multiply.outer(t, tm.omega))
    z = 1j * (phase @ (tm.q[i].conj() * tm.q[j]))
    out = np.where(t >= 0, 2.0 * z.real, 0.0)
    return float(out) if out.ndim == 0 else out


def chi_time_matrix(tm: TransitionMoments, t: float) -> np.ndarray:
    if t < 0:
        return np.zeros((tm.n_ops, tm.n_ops))
    phase = np.exp(1j * tm.omega * t)
    z = 1j * ((tm.q.conj() * phase) @ tm.q.T)
    return 2.0 * z.real


def _check_s(s):
    if not s > 0:
        raise NonPositiveSError(f"Laplace variable must be a positive real, got {s}")


def chi_laplace(tm: TransitionMoments, i: int, j: int, s: float) -> complex:
    _check_s(s)
    qi, qj, w = tm.q[i], tm.q[j], tm.omega
    terms = 1j * qi.conj() * qj / (s - 1j * w) - 1j * qi * qj.conj() / (s + 1j * w)
    return complex(terms.sum())


def chi_laplace_matrix(tm: TransitionMoments, s: float) -> np.ndarray:
    _check_s(s)
    a = tm.q.conj() / (s - 1j * tm.omega)
    m = 1j * a @ tm.q.T
    return m + m.conj()


@dataclass
class Perturbation:
    """Separable perturbation dv_j(t) = w_j f(t).

    Profiles: ``exponential`` f = exp(-a t), ``step`` f = theta(t),
    ``damped_cosine`` f = exp(-a t) cos(b t).
    """

    weights: np.ndarray
    profile: str = "exponential"
    rate: float = 1.0
    frequency: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights)
        if np.iscomplexobj(w):
            if np.max(np.abs(w.imag), initial=0.0) > 0:
                raise ValueError("perturbation weights must be real")
            w = w.real
        self.weights = w.astype(float)
        if self.profile not in PROFILES:
            raise UnsupportedProfileError(f"profile {self.profile!r} not in {PROFILES}")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.profile == "exponential":
            f = np.exp(-self.rate * t)
        elif self.profile == "step":
            f = np.ones_like(t)
        else:
            f = np.exp(-self.rate * t) * np.cos(self.frequency * t)
        return np.where(t >= 0, f, 0.0)

    def laplace(self, s: float) -> float:
        _check_s(s)
        if self.profile == "exponential":
            return 1.0 / (s + self.rate)
        if self.profile == "step":
            return 1.0 / s
        sa = s + self.rate
        return sa / (sa ** 2 + self.frequency ** 2)


@dataclass
class PowerIdentity:
    lhs: complex
    rhs: float
    residual: float


def power_identity_check(tm: TransitionMoments, pert: Perturbation, s: float) -> PowerIdentity:
    """Both sides of sum_i L[dv_i] L[dQ_i] = -2 sum_K W_K/(s^2+W_K^2) |L[a_K]|^2."""
    f = pert.laplace(s)
    w = pert.weights
    if w.size != tm.n_ops:
        raise DimensionMismatchError(f"{w.size} weights for {tm.n_ops} operators")
    dq = chi_laplace_matrix(tm, s) @ (w * f)
    lhs = complex(np.sum(w * f * dq))
    a = w @ tm.q
    # a_K at cancellation level of its summands is round-off; flush it so that
    # kernel directions give rhs = 0 exactly rather than ~1e-32
    scale = float(np.max(np.abs(w) @ np.abs(tm.q), initial=0.0))
    a = np.where(np.abs(a) <= CANCEL_RTOL * scale, 0.0, a) * f
    rhs = float(-2.0 * np.sum(tm.omega / (s ** 2 + tm.omega ** 2) * np.abs(a) ** 2))
    return PowerIdentity(lhs, rhs, abs(lhs - rhs))


def real_null_space(a: np.ndarray, rtol: float = NULLSPACE_RTOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of {w real : a @ w = 0}, for complex ``a``.

    Singular values below ``rtol * max(s_max, scale)`` count as zero.  The
    ``scale`` floor keeps a matrix made only of rounding noise from being
    mistaken for a full-rank one.
    """
    n = a.shape[1]
    stacked = np.vstack([a.real, a.imag]) if np.iscomplexobj(a) else a
    if stacked.size == 0:
        return np.eye(n)
    smax = float(np.linalg.norm(stacked, 2))
    if smax == 0.0 or smax < rtol * scale:
        return np.eye(n)
    return scipy.linalg.null_space(stacked, rcond=rtol * max(smax, scale) / smax)


@dataclass
class KernelDiagnostics:
    residual_f0: Optional[float] = None
    residual_comm: Optional[float] = None
    eigenvalue: Optional[float] = None
    eigen_residual: Optional[float] = None
    degenerate_components: Optional[np.ndarray] = None
    residual_chi: Optional[float] = None


@dataclass(eq=False)
class ResponseKernelResult:
    basis: np.ndarray  # (k, n_ops) orthonormal real rows
    diagnostics: list
    method: str
    D: int
    labels: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def angle_to(self, other: "ResponseKernelResult") -> float:
        return subspace_angle(self.basis, other.basis)

    def contains(self, w, tol: float = 1e-7) -> bool:
        """True if ``w`` lies in the kernel span (angle below ``tol``)."""
        w = np.asarray(w, dtype=float)
        w = w / np.linalg.norm(w)
        if self.dim == 0:
            return False
        return bool(np.linalg.norm(w - self.basis.T @ (self.basis @ w)) < tol)


def subspace_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the row spans of ``a`` and ``b``.

    pi/2 when dimensions differ; 0 for two empty spans.
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    if a.shape[0] != b.shape[0] or a.size == 0 or b.size == 0:
        return 0.0 if a.size == 0 and b.size == 0 else np.pi / 2
    return float(np.max(scipy.linalg.subspace_angles(a.T, b.T)))


def kernel_diagnostics(opset: OperatorSet, gs, w, commutators=None) -> KernelDiagnostics:
    """Condition residuals of L = sum_j w_j Q_j on the initial state."""
    psi0 = gs.psi0
    lpsi = opset.combine(w) @ psi0
    deg = gs.vectors[:, :gs.D]
    comps = deg.conj().T @ lpsi
    res_f0 = float(np.linalg.norm(lpsi - deg @ comps))
    if commutators is None:
        commutators = opset.commutator_expectations(psi0)
    res_comm = float(np.max(np.abs(commutators @ np.asarray(w, dtype=float)), initial=0.0))
    ev = float(np.vdot(psi0, lpsi).real)
    eres = float(np.linalg.norm(lpsi - ev * psi0))
    return KernelDiagnostics(residual_f0=res_f0, residual_comm=res_comm, eigenvalue=ev,
                             eigen_residual=eres, degenerate_components=comps)


def kernel_by_conditions(opset: OperatorSet, gs, rtol: float = NULLSPACE_RTOL,
                         commutators=None) -> ResponseKernelResult:
    """Kernel from the ground-manifold and commutator conditions.

    ``commutators`` optionally supplies <Psi0|[Q_i, Q_j]|Psi0> directly (e.g.
    from exact operators when the set is only known projected onto a
    truncated space); by default it is evaluated from the set's matrices.
    """
    if len(opset) == 0:
        raise EmptyOperatorSetError("operator set is empty")
    if opset.dim != gs.vectors.shape[0]:
        raise DimensionMismatchError("operator set and ground state live in different spaces")
    psi0 = gs.psi0
    excited = gs.vectors[:, gs.D:]
    # rows K >= D: <Psi_K| Q_j |Psi0>
    acts = [op.matrix @ psi0 for op in opset]
    a = np.column_stack([excited.conj().T @ v for v in acts])
    ref = max(float(np.linalg.norm(v)) for v in acts)
    cand = real_null_space(a, rtol, ref)
    if commutators is None:
        commutators = opset.commutator_expectations(psi0)
    commutators = np.asarray(commutators)
    basis = cand
    if gs.D > 1 and cand.shape[1] > 0:
        sub = real_null_space(commutators.imag @ cand, rtol, ref * ref)
        basis = cand @ sub
    basis = basis.T
    diags = [kernel_diagnostics(opset, gs, w, commutators) for w in basis]
    if gs.D > 1:
        for d in diags:
            if d.eigen_residual > 1e-8:
                d.eigenvalue = None
    return ResponseKernelResult(basis, diags, "conditions", gs.D, opset.labels)


def kernel_by_chi_nullspace(tm: TransitionMoments, s_samples, rtol: float = NULLSPACE_RTOL) -> ResponseKernelResult:
    """Kernel as the common real null space of chi(s) over positive samples."""
    s_samples = np.unique(np.asarray(s_samples, dtype=float))
    if s_samples.size < 3:
        raise TooFewSamplesError("need at least 3 distinct positive s samples")
    if tm.n_ops == 0:
        raise EmptyOperatorSetError("operator set is empty")
    mats = [chi_laplace_matrix(tm, s) for s in s_samples]
    ref = float(np.max(np.sum(np.abs(tm.q) ** 2, axis=1), initial=0.0)) / float(s_samples.min())
    basis = real_null_space(np.vstack(mats), rtol, ref).T
    diags = [KernelDiagnostics(residual_chi=float(max(np.linalg.norm(m @ w) for m in mats)))
             for w in basis]
    return ResponseKernelResult(basis, diags, "chi_nullspace", tm.D, list(tm.labels))


def lehmann_convolution(tm: TransitionMoments, pert: Perturbation, t_grid, n_nodes: int = 200) -> np.ndarray:
    """First-order response sum_j int_0^t chi_ij(t-t') w_j f(t') dt' by Gauss-Legendre quadrature.

    Returns an array of shape (n_ops, len(t_grid)).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    x, wq = np.polynomial.legendre.leggauss(n_nodes)
    a = pert.weights @ tm.q  # a_K
    coef = 1j * tm.q.conj() * a  # (n_ops, K)
    out = np.zeros((tm.n_ops, t_grid.size))
    for n, t in enumerate(t_grid):
        if t <= 0:
            continue
        tp = 0.5 * t * (x + 1.0)
        kern = np.exp(1j * np.multiply.outer(t - tp, tm.omega)) * pert.value(tp)[:, None]
        integral = 0.5 * t * (wq @ kern)  # (K,)
        out[:, n] = 2.0 * (coef @ integral).real
    return out


@dataclass
class UniquenessReport:
    epsilon: float
    delta_kernel: float
    delta_nonkernel: float
    kernel_ok: bool
    nonkernel_ok: bool

    @property
    def passed(self) -> bool:
        return self.kernel_ok and self.nonkernel_ok


def static_rdm_change(H, gs, opset: OperatorSet, w, epsilon: float) -> float:
    """Frobenius norm of the ground-state 1RDM change under H + eps * sum_j w_j Q_j."""
    from .model import solve_ground
    from .rdm import compute_1rdm

    space = H.space
    g0 = compute_1rdm(gs.psi0, space)
    pert = solve_ground(H.matrix + epsilon * opset.combine(w), tol_deg=gs.tol_deg)
    if pert.D > 1:
        raise DegenerateGroundStateError("perturbed ground state is degenerate")
    return float(np.linalg.norm(compute_1rdm(pert.psi0, space) - g0))


def verify_gs_uniqueness(H, gs, kernel_vector, opset: OperatorSet, epsilon: float = 1e-3,
                         kernel_basis=None, rng=None) -> UniquenessReport:
    """Re-solve the static problem along a kernel and a random non-kernel direction."""
    if gs.D != 1:
        raise DegenerateGroundStateError("static uniqueness check requires a nondegenerate ground state")
    rng = np.random.default_rng(rng)
    kv = np.asarray(kernel_vector, dtype=float)
    kb = np.atleast_2d(kv if kernel_basis is None else kernel_basis)
    q, _ = np.linalg.qr(kb.T)
    r = rng.standard_normal(len(opset))
    r -= q @ (q.T @ r)
    r /= np.linalg.norm(r)
    dk = static_rdm_change(H, gs, opset, kv, epsilon)
    dn = static_rdm_change(H, gs, opset, r, epsilon)
    return UniquenessReport(epsilon, dk, dn, dk <= 1e-9, dn > 1e-6 * epsilon)
