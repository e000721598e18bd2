"""Hot loops of the enumeration oracle.

Every kernel has a numba implementation and a pure-numpy one with identical
semantics.  The public wrappers dispatch on :data:`hyperell._accel.HAVE_NUMBA`
unless a backend is requested explicitly.

Field elements are int32 codes (see :mod:`hyperell.field`); multiplication goes
through log/exp tables, addition through XOR (p = 2) or Zech logarithms.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit


# --------------------------------------------------------------------------
# numba versions


@njit(cache=True, inline="always")
def _nb_add(a, b, log, exp, zech, qm1, p):
    if p == 2:
        return a ^ b
    if a == 0:
        return b
    if b == 0:
        return a
    la = log[a]
    i = log[b] - la
    if i < 0:
        i += qm1
    z = zech[i]
    if z < 0:
        return 0
    s = la + z
    if s >= qm1:
        s -= qm1
    return exp[s]


@njit(cache=True)
def _nb_horner(coeffs, points, log, exp, zech, qm1, p, out):
    nrows, ncoef = coeffs.shape
    npts = points.shape[0]
    for b in range(nrows):
        for j in range(npts):
            x = points[j]
            lx = log[x]
            acc = coeffs[b, ncoef - 1]
            for i in range(ncoef - 2, -1, -1):
                if acc != 0:
                    if x == 0:
                        acc = 0
                    else:
                        s = log[acc] + lx
                        if s >= qm1:
                            s -= qm1
                        acc = exp[s]
                acc = _nb_add(acc, coeffs[b, i], log, exp, zech, qm1, p)
            out[b, j] = acc


@njit(cache=True)
def _nb_poly_mul(a, b, log, exp, zech, qm1, p, out):
    nrows, la = a.shape
    lb = b.shape[1]
    for r in range(nrows):
        for k in range(la + lb - 1):
            out[r, k] = 0
        for i in range(la):
            x = a[r, i]
            if x == 0:
                continue
            lx = log[x]
            for j in range(lb):
                y = b[r, j]
                if y == 0:
                    continue
                s = lx + log[y]
                if s >= qm1:
                    s -= qm1
                out[r, i + j] = _nb_add(out[r, i + j], exp[s], log, exp, zech, qm1, p)


# --------------------------------------------------------------------------
# numpy versions


def np_mul(a, b, log, exp, qm1):
    """Elementwise product of code arrays (broadcasting)."""
    a = np.asarray(a)
    b = np.asarray(b)
    zero = (a == 0) | (b == 0)
    s = (log[a].astype(np.int64) + log[b]) % qm1
    return np.where(zero, 0, exp[s]).astype(np.int32)


def np_add(a, b, log, exp, zech, qm1, p):
    """Elementwise sum of code arrays (broadcasting)."""
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    if p == 2:
        return np.bitwise_xor(a, b)
    a, b = np.broadcast_arrays(a, b)
    la = log[a].astype(np.int64)
    i = (log[b] - la) % qm1
    z = zech[i]
    s = np.where(z < 0, 0, exp[(la + np.maximum(z, 0)) % qm1])
    s = np.where(a == 0, b, np.where(b == 0, a, s))
    return s.astype(np.int32)


def _np_horner(coeffs, points, log, exp, zech, qm1, p):
    nrows, ncoef = coeffs.shape
    x = points[None, :]
    acc = np.broadcast_to(coeffs[:, ncoef - 1:ncoef], (nrows, points.shape[0])).astype(np.int32)
    for i in range(ncoef - 2, -1, -1):
        acc = np_mul(acc, x, log, exp, qm1)
        acc = np_add(acc, coeffs[:, i:i + 1], log, exp, zech, qm1, p)
    return acc


def _np_poly_mul(a, b, log, exp, zech, qm1, p):
    nrows, la = a.shape
    lb = b.shape[1]
    out = np.zeros((nrows, la + lb - 1), dtype=np.int32)
    for i in range(la):
        for j in range(lb):
            term = np_mul(a[:, i], b[:, j], log, exp, qm1)
            out[:, i + j] = np_add(out[:, i + j], term, log, exp, zech, qm1, p)
    return out


# --------------------------------------------------------------------------
# dispatch


def _pick(backend):
    if backend is None:
        return "numba" if HAVE_NUMBA else "numpy"
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is disabled or missing")
    return backend


def horner(coeffs, points, tab, backend=None):
    """Evaluate each row of ``coeffs`` (low degree first) at every point.

    Returns an int32 array of shape (rows, points).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int32)
    points = np.ascontiguousarray(points, dtype=np.int32)
    if coeffs.shape[1] == 0:
        return np.zeros((coeffs.shape[0], points.shape[0]), dtype=np.int32)
    if _pick(backend) == "numba":
        out = np.empty((coeffs.shape[0], points.shape[0]), dtype=np.int32)
        _nb_horner(coeffs, points, tab.log, tab.exp, tab.zech, tab.qm1, tab.p, out)
        return out
    return _np_horner(coeffs, points, tab.log, tab.exp, tab.zech, tab.qm1, tab.p)


def poly_mul_rows(a, b, tab, backend=None):
    """Row-wise polynomial product over the field of ``tab``."""
    a = np.ascontiguousarray(a, dtype=np.int32)
    b = np.ascontiguousarray(b, dtype=np.int32)
    if _pick(backend) == "numba":
        out = np.empty((a.shape[0], a.shape[1] + b.shape[1] - 1), dtype=np.int32)
        _nb_poly_mul(a, b, tab.log, tab.exp, tab.zech, tab.qm1, tab.p, out)
        return out
    return _np_poly_mul(a, b, tab.log, tab.exp, tab.zech, tab.qm1, tab.p)


@njit(cache=True)
def _nb_tau_stats(hrow, fv, log, exp, trace, qm1, S, T):
    nf, npts = fv.shape
    for j in range(nf):
        s = 0
        t = 0
        for k in range(npts):
            a = hrow[k]
            if a == 0:
                continue
            t += 1
            b = fv[j, k]
            if b == 0:
                s += 1
                continue
            e = (log[b] - 2 * log[a]) % qm1
            if e < 0:
                e += qm1
            s += 1 - 2 * trace[exp[e]]
        S[j] = s
        T[j] = t


def _np_tau_stats(hrow, fv, log, exp, trace, qm1):
    mask = hrow != 0
    a = hrow[mask]
    b = fv[:, mask]
    e = (log[b].astype(np.int64) - 2 * log[a].astype(np.int64)[None, :]) % qm1
    tau = np.where(b == 0, 1, 1 - 2 * trace[exp[e]].astype(np.int64))
    S = tau.sum(axis=1)
    T = np.full(fv.shape[0], int(mask.sum()), dtype=np.int64)
    return S, T


def tau_stats(hrow, fv, log, exp, trace, qm1, backend=None):
    """Sum of tau(h(P), f(P)) and of its square over the columns, one h against many f.

    ``hrow`` holds h at each point, ``fv`` has one row of f-values per polynomial f.
    """
    hrow = np.ascontiguousarray(hrow, dtype=np.int32)
    fv = np.ascontiguousarray(fv, dtype=np.int32)
    if _pick(backend) == "numba":
        S = np.empty(fv.shape[0], dtype=np.int64)
        T = np.empty(fv.shape[0], dtype=np.int64)
        _nb_tau_stats(hrow, fv, log, exp, trace.astype(np.int64), qm1, S, T)
        return S, T
    return _np_tau_stats(hrow, fv, log, exp, trace, qm1)
