import numpy as np
import pytest

from respkern.fock import enumerate_sector
from respkern.model import build_hubbard, build_pairing, solve_ground
from respkern.symops import spin_ops


def jw_annihilators(m: int) -> list:
    """Full 2^m Fock-space annihilators a_p built by Kronecker products.

    Basis index = integer bitstring with bit p for orbital p, matching the
    package's determinant encoding; the sign string counts orbitals below p.
    """
    dim = 1 << m
    ops = []
    for p in range(m):
        a = np.zeros((dim, dim))
        for det in range(dim):
            if (det >> p) & 1:
                sign = (-1) ** bin(det & ((1 << p) - 1)).count("1")
                a[det ^ (1 << p), det] = sign
        ops.append(a)
    return ops


def sector_restrict(full: np.ndarray, space) -> np.ndarray:
    idx = space.dets.astype(np.int64)
    return full[np.ix_(idx, idx)]


@pytest.fixture(scope="session")
def dimer():
    H = build_hubbard(2, 1.0, 4.0, 2)
    return H, solve_ground(H)


@pytest.fixture(scope="session")
def dimer_u0():
    H = build_hubbard(2, 1.0, 0.0, 2)
    return H, solve_ground(H)


def triplet_model():
    return build_pairing((0.0, 0.5), 0.2, 4.0, 2)


@pytest.fixture(scope="session")
def triplet_m0():
    H = triplet_model()
    sz = spin_ops(H.space)["Sz"]
    return H, solve_ground(H, psi0=[0, 1, 0], resolve=sz)


@pytest.fixture(scope="session")
def triplet_m1():
    H = triplet_model()
    sz = spin_ops(H.space)["Sz"]
    return H, solve_ground(H, psi0=[0, 0, 1], resolve=sz)


@pytest.fixture(scope="session")
def equal_pairs():
    H = build_pairing((0.0, 0.0), 1.0, 0.0, 2)
    return H, solve_ground(H)


@pytest.fixture(scope="session")
def unequal_pairs():
    H = build_pairing((0.0, 0.5), 1.0, 0.0, 2)
    return H, solve_ground(H)


@pytest.fixture
def space42():
    return enumerate_sector(4, 2)


# one line per acceptance criterion, printed after the run regardless of capture
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
