"""Pure-Python (numpy-vectorized) fallback for the determinant kernels.

Same signatures and return conventions as the compiled ``_kernels`` module.
Loops run over orbital indices; each iteration acts on the whole
determinant array at once.
"""
import numpy as np


def _sign_below(dets, p):
    below = dets & np.uint64((1 << p) - 1)
    return 1.0 - 2.0 * (np.bitwise_count(below) & 1)


def _occupied(dets, p):
    return ((dets >> np.uint64(p)) & np.uint64(1)).astype(bool)


def one_body_table(dets, n_orb):
    dets = np.ascontiguousarray(dets, dtype=np.uint64)
    cols_all = np.arange(dets.size, dtype=np.int64)
    rows, cols, cre, ann, sgn = [], [], [], [], []
    for q in range(n_orb):
        occ_q = _occupied(dets, q)
        if not occ_q.any():
            continue
        d1 = dets ^ np.uint64(1 << q)
        s1 = _sign_below(dets, q)
        for p in range(n_orb):
            mask = occ_q & ~_occupied(d1, p)
            if not mask.any():
                continue
            d2 = d1[mask] | np.uint64(1 << p)
            rows.append(np.searchsorted(dets, d2).astype(np.int64))
            cols.append(cols_all[mask])
            cre.append(np.full(mask.sum(), p, dtype=np.int64))
            ann.append(np.full(mask.sum(), q, dtype=np.int64))
            sgn.append(s1[mask] * _sign_below(d1[mask], p))
    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), empty.copy(), np.zeros(0)
    return (np.concatenate(rows), np.concatenate(cols), np.concatenate(cre),
            np.concatenate(ann), np.concatenate(sgn))


def two_body_matrix(dets, n_orb, w):
    dets = np.ascontiguousarray(dets, dtype=np.uint64)
    dim = dets.size
    out = np.zeros((dim, dim), dtype=np.complex128)
    cols_all = np.arange(dim)
    for p, q, r, s in np.argwhere(w != 0):
        if p == q or r == s:
            continue
        # a^+_p a^+_q a_s a_r, rightmost first
        d, sign, cols = dets, np.ones(dim), cols_all
        ok = _occupied(d, r)
        d, sign, cols = d[ok], sign[ok], cols[ok]
        sign = sign * _sign_below(d, r)
        d = d ^ np.uint64(1 << r)
        ok = _occupied(d, s)
        d, sign, cols = d[ok], sign[ok], cols[ok]
        sign = sign * _sign_below(d, s)
        d = d ^ np.uint64(1 << s)
        ok = ~_occupied(d, q)
        d, sign, cols = d[ok], sign[ok], cols[ok]
        sign = sign * _sign_below(d, q)
        d = d | np.uint64(1 << q)
        ok = ~_occupied(d, p)
        d, sign, cols = d[ok], sign[ok], cols[ok]
        sign = sign * _sign_below(d, p)
        d = d | np.uint64(1 << p)
        if d.size == 0:
            continue
        rows = np.searchsorted(dets, d)
        np.add.at(out, (rows, cols), 0.5 * sign * w[p, q, r, s])
    return out
