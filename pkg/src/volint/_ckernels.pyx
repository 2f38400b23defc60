# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Same API as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, fmod, atan2, M_PI
from libc.stdlib cimport malloc, free

from ._series import CLAUSEN, DILOG

cnp.import_array()

BACKEND = "cython"

DEF MAXTERMS = 64
cdef double _CLAUSEN[MAXTERMS]
cdef double _DILOG[MAXTERMS]
cdef int _NC = len(CLAUSEN)
cdef int _ND = len(DILOG)
for _i in range(_NC):
    _CLAUSEN[_i] = CLAUSEN[_i]
for _i in range(_ND):
    _DILOG[_i] = DILOG[_i]


cdef inline long _mod(long a, long L) nogil:
    cdef long r = a % L
    if r < 0:
        r += L
    return r


cdef inline int _orient(long a, long b, long c, long L) nogil:
    if a == b or b == c or a == c:
        return 0
    if _mod(b - a, L) < _mod(c - a, L):
        return 1
    return -1


def orientation_int(long a, long b, long c, long L):
    return _orient(_mod(a, L), _mod(b, L), _mod(c, L), L)


cdef long _kappa_term(long* rows, int* perm, long* partial, int n, int m, long L) nogil:
    cdef int k, c, j
    cdef long term, o
    for c in range(m):
        partial[c] = 0
    for k in range(n):
        for c in range(m):
            partial[(k + 1) * m + c] = _mod(partial[k * m + c] + rows[perm[k] * m + c], L)
    term = partial[m]
    if term == 0:
        return 0
    for j in range(2, m + 1):
        c = j - 1
        o = _orient(partial[(2 * j - 3) * m + c], partial[(2 * j - 2) * m + c],
                    partial[(2 * j - 1) * m + c], L)
        if o == 0:
            return 0
        term *= o
    return term


def kappa_pairing_num(gens, long L, int m):
    """Integer numerator of the kappa pairing; Heap's algorithm over Sym(2m-1)."""
    cdef int n = 2 * m - 1
    cdef int i, c, sign
    cdef long total = 0
    if len(gens) != n:
        raise ValueError(f"expected {n} generators, got {len(gens)}")
    cdef long* rows = <long*> malloc(n * m * sizeof(long))
    cdef long* partial = <long*> malloc((n + 1) * m * sizeof(long))
    cdef int* perm = <int*> malloc(n * sizeof(int))
    cdef int* cnt = <int*> malloc(n * sizeof(int))
    cdef int tmp
    try:
        for i in range(n):
            row = gens[i]
            for c in range(m):
                rows[i * m + c] = _mod(<long> int(row[c]), L)
        for i in range(n):
            perm[i] = i
            cnt[i] = 0
        with nogil:
            sign = 1
            total += _kappa_term(rows, perm, partial, n, m, L)
            i = 0
            while i < n:
                if cnt[i] < i:
                    if i % 2 == 0:
                        tmp = perm[0]; perm[0] = perm[i]; perm[i] = tmp
                    else:
                        tmp = perm[cnt[i]]; perm[cnt[i]] = perm[i]; perm[i] = tmp
                    sign = -sign
                    total += sign * _kappa_term(rows, perm, partial, n, m, L)
                    cnt[i] += 1
                    i = 0
                else:
                    cnt[i] = 0
                    i += 1
    finally:
        free(rows)
        free(partial)
        free(perm)
        free(cnt)
    return total


cdef double _clausen_reduced(double x) nogil:
    cdef double x2, acc, power, term
    cdef int k
    if x == 0.0:
        return 0.0
    x2 = x * x
    acc = 0.0
    power = x * x2
    for k in range(_NC):
        term = _CLAUSEN[k] * power
        acc += term
        if fabs(term) < 1e-18:
            break
        power *= x2
    return x - x * log(fabs(x)) + acc


cdef double _lob(double theta) nogil:
    cdef double t = fmod(theta, M_PI)
    if t > 0.5 * M_PI:
        t -= M_PI
    elif t <= -0.5 * M_PI:
        t += M_PI
    return 0.5 * _clausen_reduced(2.0 * t)


def lobachevsky(double theta):
    return _lob(theta)


def lobachevsky_many(thetas):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(
        np.asarray(thetas, dtype=np.float64).ravel())
    cdef Py_ssize_t i, size = flat.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(size, dtype=np.float64)
    with nogil:
        for i in range(size):
            out[i] = _lob(flat[i])
    return out.reshape(np.shape(thetas))


cdef double _bw(double re, double im) nogil:
    cdef double sign = 1.0
    cdef double r2, wr, wi, ur, ui, u2r, u2i, pr, pi, ar, ai, tr, ti, t
    cdef int k
    if im == 0.0:
        return 0.0
    r2 = re * re + im * im
    if r2 > 1.0:
        re, im = re / r2, -im / r2
        sign = -sign
    if re > 0.5:
        re, im = 1.0 - re, -im
        sign = -sign
    r2 = re * re + im * im
    if r2 == 0.0:
        return 0.0
    # w = 1 - z ; u = -log(w)
    wr = 1.0 - re
    wi = -im
    ur = -0.5 * log(wr * wr + wi * wi)
    ui = -atan2(wi, wr)
    u2r = ur * ur - ui * ui
    u2i = 2.0 * ur * ui
    ar = ur - 0.25 * u2r
    ai = ui - 0.25 * u2i
    pr = ur * u2r - ui * u2i
    pi = ur * u2i + ui * u2r
    for k in range(_ND):
        tr = _DILOG[k] * pr
        ti = _DILOG[k] * pi
        ar += tr
        ai += ti
        if fabs(tr) + fabs(ti) < 1e-18:
            break
        t = pr * u2r - pi * u2i
        pi = pr * u2i + pi * u2r
        pr = t
    return sign * (ai + atan2(wi, wr) * 0.5 * log(r2))


def bloch_wigner(double re, double im):
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1-z) log|z|."""
    return _bw(re, im)


def bloch_wigner_many(zs):
    arr = np.asarray(zs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] re = np.ascontiguousarray(arr.real.ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] im = np.ascontiguousarray(arr.imag.ravel())
    cdef Py_ssize_t i, size = re.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(size, dtype=np.float64)
    with nogil:
        for i in range(size):
            out[i] = _bw(re[i], im[i])
    return out.reshape(arr.shape)
