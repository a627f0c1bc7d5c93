"""Real-time propagation under H0 + eps * sum_j w_j f(t) Q_j.

Each step applies the exact exponential of the Hamiltonian frozen at the
step midpoint, so the state norm is preserved up to round-off and the
global error is O(dt^2).  This path never touches the Lehmann data and serves
as an independent check of the response module.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NonHermitianError, StepTooLargeError
from .response import OperatorSet, Perturbation

DT_RHO = 0.05
NORM_TOL = 1e-9


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    delta_q: np.ndarray = field(repr=False)  # (n_ops, n_times)
    epsilon: float
    dt: float
    norm_drift: float

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.delta_q), initial=0.0))


def default_dt(h0: np.ndarray, v: np.ndarray, epsilon: float, fmax: float = 1.0) -> float:
    """Largest step with dt * rho <= 0.05, rho the spectral radius of H0 + eps*|f|max*V."""
    rho = float(np.max(np.abs(np.linalg.eigvalsh(h0)))) + epsilon * fmax * float(np.linalg.norm(v, 2))
    return DT_RHO / max(rho, 1e-12)


def evolve_linear_response(H0, gs, pert: Perturbation, opset: OperatorSet, t_grid, epsilon: float,
                           dt: float = None) -> Trajectory:
    """delta <Q_i>(t) on ``t_grid`` starting from the ground-state choice in ``gs``.

    Output times must start at 0 and increase strictly; each interval is split
    into equal midpoint-exponential substeps no longer than ``dt``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if not 0.0 <= epsilon <= 0.1:
        raise ValueError(f"epsilon must lie in [0, 0.1], got {epsilon}")
    if t_grid.size == 0 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must start at 0 and be strictly increasing")
    h0 = np.asarray(getattr(H0, "matrix", H0), dtype=complex)
    if np.max(np.abs(h0 - h0.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(h0))):
        raise NonHermitianError("H0 is not hermitian")
    v = opset.combine(pert.weights)
    if dt is None:
        dt = default_dt(h0, v, epsilon)

    psi0 = gs.psi0.astype(complex)
    mats = np.array([op.matrix for op in opset])
    q0 = np.einsum("i,kij,j->k", psi0.conj(), mats, psi0).real
    out = np.zeros((len(opset), t_grid.size))
    psi = psi0.copy()
    drift = 0.0
    for n in range(1, t_grid.size):
        t0, t1 = t_grid[n - 1], t_grid[n]
        steps = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
        h = (t1 - t0) / steps
        for k in range(steps):
            tm = t0 + (k + 0.5) * h
            ham = h0 + epsilon * float(pert.value(tm)) * v
            e, u = np.linalg.eigh(ham)
            psi = u @ (np.exp(-1j * e * h) * (u.conj().T @ psi))
        drift = max(drift, abs(np.linalg.norm(psi) - 1.0))
        if drift > NORM_TOL:  # guards against round-off build-up over long grids
            raise StepTooLargeError(f"norm drift {drift:.2e} exceeds {NORM_TOL:.0e}; reduce dt")
        out[:, n] = np.einsum("i,kij,j->k", psi.conj(), mats, psi).real - q0
    return Trajectory(t_grid, out, epsilon, dt, drift)


@dataclass
class ScalingReport:
    epsilons: tuple
    maxima: tuple
    ratio: float  # max|dQ(eps)| / max|dQ(eps/2)|


def epsilon_scaling(H0, gs, pert: Perturbation, opset: OperatorSet, t_grid, epsilon: float,
                    dt: float = None) -> ScalingReport:
    """Halve epsilon once and report the ratio of response maxima.

    About 2 for a response linear in epsilon, about 4 when the first-order
    response vanishes and the leading term is quadratic.
    """
    a = evolve_linear_response(H0, gs, pert, opset, t_grid, epsilon, dt)
    b = evolve_linear_response(H0, gs, pert, opset, t_grid, epsilon / 2, dt if dt else a.dt)
    ma, mb = a.max_abs(), b.max_abs()
    return ScalingReport((epsilon, epsilon / 2), (ma, mb), ma / mb if mb > 0 else float("nan"))


def richardson_ratio(H0, gs, pert: Perturbation, opset: OperatorSet, t_grid, epsilon: float,
                     dt: float = None) -> float:
    """|dQ(2e) - 2 dQ(e)| / |dQ(e) - 2 dQ(e/2)|, about 4 when the nonlinearity is O(eps^2)."""
    ts = [evolve_linear_response(H0, gs, pert, opset, t_grid, e, dt)
          for e in (2 * epsilon, epsilon, epsilon / 2)]
    num = np.max(np.abs(ts[0].delta_q - 2 * ts[1].delta_q))
    den = np.max(np.abs(ts[1].delta_q - 2 * ts[2].delta_q))
    return float(num / den)
