"""Hydrogenic toy space {2s, 2p_x, 2p_y, 3p_x} with dipole and third-derivative operators.

Radial functions are polynomial times exp(-r/n), so every matrix element
reduces to int_0^inf poly(r) exp(-beta r) dr, which a scaled Gauss-Laguerre
rule integrates exactly.  Angular factors are done analytically:
<n_x^2> = 1/3 and <n_x^4> = 1/5 over the unit sphere.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import roots_laguerre

from ..errors import UnsupportedLabelError
from ..fock import ManyBodyOperator
from ..model import solve_ground
from ..response import OperatorSet, ResponseKernelResult, chi_time_matrix, kernel_by_conditions, transition_moments

BASIS_LABELS = ("2s", "2p_x", "2p_y", "3p_x")
OPERATOR_LABELS = ("1", "x", "y", "i∂x³")
_ALIASES = {"id": "1", "one": "1", "idx3": "i∂x³", "i_dx3": "i∂x³"}
N_QUAD = 200
OMEGA_3P = 5.0 / 72.0  # E_3 - E_2 in hartree

EXACT = {
    ("x", "2p_x", "2s"): complex(-3),
    ("x", "3p_x", "2s"): complex(Fraction(27648, 15625)),
    ("i∂x³", "2p_x", "2s"): 1j / 20,
    ("i∂x³", "3p_x", "2s"): 576j / 15625,
}
EXACT_COMMUTATOR = 0.25j  # <2s|[x, i d^3/dx^3]|2s>


@dataclass(frozen=True)
class _Radial:
    """R(r) = poly(r) exp(-a r)."""

    poly: Polynomial
    a: float
    kind: str  # "s" or "p"

    def derivative(self) -> "_Radial":
        return _Radial(self.poly.deriv() - self.a * self.poly, self.a, self.kind)


_RADIAL = {
    "2s": _Radial(Polynomial([2.0, -1.0]) / (2 * np.sqrt(2)), 0.5, "s"),
    "2p": _Radial(Polynomial([0.0, 1.0]) / (2 * np.sqrt(6)), 0.5, "p"),
    "3p": _Radial(Polynomial([0.0, 1.0, -1.0 / 6]) * (8 / (27 * np.sqrt(6))), 1 / 3, "p"),
}


def _radial_of(label):
    return _RADIAL[label[:2]]


def _axis_of(label):
    return label.split("_")[1] if "_" in label else None


@lru_cache(maxsize=None)
def _laguerre_rule(n):
    return roots_laguerre(n)


def _laguerre_integral(poly: Polynomial, beta: float) -> float:
    """int_0^inf poly(r) exp(-beta r) dr."""
    x, w = _laguerre_rule(N_QUAD)
    return float(np.sum(w * poly(x / beta)) / beta)


def _x_element(bra: str, ket: str, axis: str) -> complex:
    """<bra|axis|ket> for one p-type and one s-type state."""
    p, s = (bra, ket) if _axis_of(bra) else (ket, bra)
    if _axis_of(p) != axis or _axis_of(s) is not None:
        return 0.0
    rp, rs = _radial_of(p), _radial_of(s)
    # p_x = sqrt(3/4pi) n_x R_p, s = R_s / sqrt(4pi): angular factor sqrt(3)/3
    val = _laguerre_integral(rp.poly * rs.poly * Polynomial([0, 0, 0, 1]), rp.a + rs.a) / np.sqrt(3)
    return complex(val)


def _d3_element(bra: str, ket: str) -> complex:
    """<bra|i d^3/dx^3|ket>; nonzero only between p_x-type and s-type states."""
    if _axis_of(bra) == "x" and _axis_of(ket) is None:
        rp, rs = _radial_of(bra), _radial_of(ket)
        d1 = rs.derivative()
        d2 = d1.derivative()
        d3 = d2.derivative()
        r = Polynomial([0, 1])
        # d^3_x f(r) = 3 x D^2 f + x^3 D^3 f with D = (1/r) d/dr; after the
        # r^2 R_p measure the integrand is polynomial times exp
        p_over_r = Polynomial(rp.poly.coef[1:])  # R_p / r, R_p has no constant term
        g2 = r * r * d2.poly - r * d1.poly
        g3 = r ** 3 * d3.poly - 3 * r * r * d2.poly + 3 * r * d1.poly
        integrand = p_over_r * (g2 + g3 / 5.0)
        return 1j * np.sqrt(3) * _laguerre_integral(integrand, rp.a + rs.a)
    if _axis_of(ket) == "x" and _axis_of(bra) is None:
        return np.conj(_d3_element(ket, bra))
    return 0.0


def _canonical_op(label):
    label = _ALIASES.get(label, label)
    if label not in OPERATOR_LABELS:
        raise UnsupportedLabelError(f"operator {label!r} not in {OPERATOR_LABELS}")
    return label


def matrix_element(op: str, bra: str, ket: str) -> complex:
    op = _canonical_op(op)
    for lab in (bra, ket):
        if lab not in BASIS_LABELS:
            raise UnsupportedLabelError(f"state {lab!r} not in {BASIS_LABELS}")
    if op == "1":
        return complex(bra == ket)
    if op in ("x", "y"):
        if (_axis_of(bra) is None) == (_axis_of(ket) is None):
            return 0.0  # parity
        return _x_element(bra, ket, op)
    return complex(_d3_element(bra, ket))


def full_space_commutator_2s() -> complex:
    """<2s|[x, i d^3/dx^3]|2s> for the unprojected operators.

    [x, i d^3] = -3i d^2, and <2s|d^2/dx^2|2s> = -(1/3) int r^2 R'(r)^2 dr.
    """
    d = _RADIAL["2s"].derivative()
    return 1j * _laguerre_integral(Polynomial([0, 0, 1]) * d.poly * d.poly, 2 * d.a)


@dataclass(eq=False)
class HydrogenSpace:
    basis: tuple
    operators: tuple
    matrices: dict = field(repr=False)

    def element(self, op: str, bra: str, ket: str) -> complex:
        op = _canonical_op(op)
        return complex(self.matrices[op][self.basis.index(bra), self.basis.index(ket)])

    def operator_set(self, ops=None) -> OperatorSet:
        ops = self.operators if ops is None else [_canonical_op(o) for o in ops]
        return OperatorSet([ManyBodyOperator(o, self.matrices[o]) for o in ops])

    def projected_commutator(self, a: str, b: str, state: str = "2s") -> complex:
        i = self.basis.index(state)
        ma, mb = self.matrices[_canonical_op(a)], self.matrices[_canonical_op(b)]
        return complex((ma @ mb - mb @ ma)[i, i])

    def state(self, label: str) -> np.ndarray:
        v = np.zeros(len(self.basis), dtype=complex)
        v[self.basis.index(label)] = 1.0
        return v


def hydrogen_matrix_elements(basis=("2s", "2p_x", "2p_y"), operators=("1", "x", "y")) -> HydrogenSpace:
    """Operator matrices restricted (projected) onto the chosen hydrogenic states."""
    basis = tuple(basis)
    for lab in basis:
        if lab not in BASIS_LABELS:
            raise UnsupportedLabelError(f"state {lab!r} not in {BASIS_LABELS}")
    ops = tuple(_canonical_op(o) for o in operators)
    mats = {}
    for o in ops:
        m = np.array([[matrix_element(o, b, k) for k in basis] for b in basis], dtype=complex)
        mats[o] = m
    return HydrogenSpace(basis, ops, mats)


def unprojected_commutators(ops, state: str = "2s") -> np.ndarray:
    """<state|[Q_i, Q_j]|state> for the exact (unprojected) operators.

    Among {1, x, y, i d^3/dx^3} only the x / i d^3/dx^3 pair fails to commute.
    """
    if state != "2s":
        raise UnsupportedLabelError("unprojected commutators are tabulated for 2s only")
    ops = [_canonical_op(o) for o in ops]
    c = np.zeros((len(ops), len(ops)), dtype=complex)
    val = full_space_commutator_2s()
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            if (a, b) == ("x", "i∂x³"):
                c[i, j] = val
            elif (a, b) == ("i∂x³", "x"):
                c[i, j] = -val
    return c


@dataclass(eq=False)
class HydrogenKernelCases:
    a: ResponseKernelResult
    b: ResponseKernelResult
    c: ResponseKernelResult
    commutator: complex  # unprojected <2s|[x, i d^3]|2s>
    commutator_projected: complex  # same, operators projected onto the 3-space
    chi_max_a: float  # max |chi_ij(t)| over the sampled grid in case (a)
    c_candidates_f0: int  # candidates passing the ground-manifold condition in case (c)
    c_exclusions: dict  # label -> commutator residual of the unit weight vector

    def __iter__(self):
        return iter((self.a, self.b, self.c))


def _degenerate_gs(n_states, omega=None):
    h = np.zeros((n_states, n_states))
    if omega is not None:
        h[-1, -1] = omega
    psi0 = np.zeros(n_states)
    psi0[0] = 1.0  # 2s is always the first basis state
    return solve_ground(h, psi0=psi0)


def hydrogen_example_kernels(t_grid=None) -> HydrogenKernelCases:
    """The three kernel cases of the degenerate n = 2 hydrogen toy model.

    (a) {1, x, y} on {2s, 2p_x, 2p_y}, H0 = 0, Psi0 = 2s;
    (b) the same operators with 3p_x added at excitation 5/72;
    (c) {1, x, y, i d^3/dx^3} on the 3-space, commutator condition with the
        unprojected operators.
    """
    if t_grid is None:
        t_grid = np.linspace(0.0, 50.0, 100)

    hs = hydrogen_matrix_elements(("2s", "2p_x", "2p_y"), ("1", "x", "y"))
    gs = _degenerate_gs(3)
    res_a = kernel_by_conditions(hs.operator_set(), gs)
    tm = transition_moments(hs.operator_set(), gs)
    chi_max = max(float(np.max(np.abs(chi_time_matrix(tm, t)))) for t in t_grid)

    hb = hydrogen_matrix_elements(("2s", "2p_x", "2p_y", "3p_x"), ("1", "x", "y"))
    res_b = kernel_by_conditions(hb.operator_set(), _degenerate_gs(4, OMEGA_3P))

    ops_c = ("1", "x", "y", "i∂x³")
    hc = hydrogen_matrix_elements(("2s", "2p_x", "2p_y"), ops_c)
    comm = unprojected_commutators(ops_c)
    set_c = hc.operator_set()
    res_c = kernel_by_conditions(set_c, gs, commutators=comm)
    cand = kernel_by_conditions(set_c, gs, commutators=np.zeros_like(comm))
    excl = {}
    for k, lab in enumerate(ops_c):
        if not res_c.contains(np.eye(len(ops_c))[k]):
            excl[lab] = float(np.max(np.abs(comm[:, k])))
    return HydrogenKernelCases(res_a, res_b, res_c, complex(comm[1, 3]),
                               hc.projected_commutator("x", "i∂x³"), chi_max, cand.dim, excl)
