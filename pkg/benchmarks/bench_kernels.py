"""Compiled vs pure-Python determinant kernels.

Times ``one_body_table`` and ``two_body_matrix`` on Hubbard-chain sectors of
growing size, checks both backends agree, and prints one line per case.

    python benchmarks/bench_kernels.py [--repeat 3] [--max-sites 6]
"""
import argparse
import time

import numpy as np

from respkern import _kernels_py
from respkern.fock import enumerate_sector
from respkern.model import hubbard_integrals

try:
    from respkern import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _spin_orbital_w(sites, u):
    _, w = hubbard_integrals(sites, 1.0, u)
    return np.ascontiguousarray(w, dtype=np.complex128)


def _dense_w(m, rng):
    """Random fully dense two-body tensor, the load an integral file produces."""
    return np.ascontiguousarray(rng.standard_normal((m, m, m, m)) + 0j)


def bench(max_sites: int = 6, repeat: int = 3):
    rows = []
    for sites in range(2, max_sites + 1):
        space = enumerate_sector(2 * sites, sites)
        w = _spin_orbital_w(sites, 2.0)
        dense = _dense_w(2 * sites, np.random.default_rng(sites))
        for name, call in (
            ("one_body_table", lambda k: k.one_body_table(space.dets, space.n_orbitals)),
            ("two_body_matrix", lambda k: k.two_body_matrix(space.dets, space.n_orbitals, w)),
            ("two_body_dense", lambda k: k.two_body_matrix(space.dets, space.n_orbitals, dense)),
        ):
            t_py, out_py = _best(lambda: call(_kernels_py), repeat)
            if _kernels is None:
                rows.append((sites, space.dim, name, t_py, None, None))
                continue
            t_c, out_c = _best(lambda: call(_kernels), repeat)
            rows.append((sites, space.dim, name, t_py, t_c, _agree(name, out_py, out_c)))
    return rows


def _agree(name, a, b) -> bool:
    if name.startswith("two_body"):
        return bool(np.allclose(a, b, atol=1e-12))
    # entries may come out in different order; compare as sorted tuples
    ka = sorted(zip(*(np.asarray(x).tolist() for x in a)))
    kb = sorted(zip(*(np.asarray(x).tolist() for x in b)))
    return ka == kb


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-sites", type=int, default=6)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; timing the Python fallback only")
    print(f"{'sites':>5} {'dim':>6} {'kernel':<16} {'python [s]':>11} {'compiled [s]':>13} {'speedup':>8} agree")
    for sites, dim, name, t_py, t_c, ok in bench(args.max_sites, args.repeat):
        if t_c is None:
            print(f"{sites:>5} {dim:>6} {name:<16} {t_py:>11.4f} {'-':>13} {'-':>8} -")
        else:
            print(f"{sites:>5} {dim:>6} {name:<16} {t_py:>11.4f} {t_c:>13.4f} {t_py / t_c:>8.1f} {ok}")


if __name__ == "__main__":
    main()
