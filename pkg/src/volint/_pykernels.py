"""Pure-Python implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``VOLINT_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import cmath
import math
from itertools import permutations

import numpy as np

from ._series import CLAUSEN, DILOG

BACKEND = "python"

_PI = math.pi
_HALF_PI = 0.5 * math.pi


def orientation_int(a: int, b: int, c: int, L: int) -> int:
    """Cyclic orientation of three points of Z/L, as in the circle cocycle Or."""
    if a == b or b == c or a == c:
        return 0
    return 1 if (b - a) % L < (c - a) % L else -1


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def kappa_pairing_num(gens, L: int, m: int) -> int:
    """Integer numerator of the kappa pairing against the fundamental cycle.

    ``gens`` is an (2m-1) x m table of angle numerators over the common
    denominator ``L``.  The pairing lift equals
    ``(-1)**(m-1) * S / (2**(m-1) * L)`` where ``S`` is returned.
    """
    n = 2 * m - 1
    rows = [[int(v) % L for v in row] for row in gens]
    if len(rows) != n:
        raise ValueError(f"expected {n} generators, got {len(rows)}")
    total = 0
    for p in permutations(range(n)):
        partial = [[0] * m]
        for idx in p:
            prev = partial[-1]
            partial.append([(prev[c] + rows[idx][c]) % L for c in range(m)])
        term = (partial[1][0] - partial[0][0]) % L
        if term == 0:
            continue
        for j in range(2, m + 1):
            c = j - 1
            o = orientation_int(
                partial[2 * j - 3][c], partial[2 * j - 2][c], partial[2 * j - 1][c], L
            )
            if o == 0:
                term = 0
                break
            term *= o
        if term:
            total += _perm_sign(p) * term
    return total


def _clausen_reduced(x: float) -> float:
    # |x| <= pi
    if x == 0.0:
        return 0.0
    x2 = x * x
    acc = 0.0
    power = x * x2
    for c in CLAUSEN:
        term = c * power
        acc += term
        if abs(term) < 1e-18:
            break
        power *= x2
    return x - x * math.log(abs(x)) + acc


def lobachevsky(theta: float) -> float:
    t = math.fmod(theta, _PI)
    if t > _HALF_PI:
        t -= _PI
    elif t <= -_HALF_PI:
        t += _PI
    return 0.5 * _clausen_reduced(2.0 * t)


def lobachevsky_many(thetas) -> np.ndarray:
    arr = np.asarray(thetas, dtype=float)
    out = np.empty(arr.shape, dtype=float)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = lobachevsky(float(flat_in[i]))
    return out


def _im_li2_reduced(z: complex) -> float:
    # |z| <= 1 and Re z <= 1/2, so |u| < 1.3
    u = -cmath.log(1.0 - z)
    u2 = u * u
    acc = u - 0.25 * u2
    power = u * u2
    for c in DILOG:
        term = c * power
        acc += term
        if abs(term) < 1e-18:
            break
        power *= u2
    return acc.imag


def bloch_wigner(re: float, im: float) -> float:
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1-z) log|z|."""
    if im == 0.0:
        return 0.0
    z = complex(re, im)
    sign = 1.0
    if abs(z) > 1.0:
        z = 1.0 / z
        sign = -sign
    if z.real > 0.5:
        z = 1.0 - z
        sign = -sign
    if z == 0:
        return 0.0
    d = _im_li2_reduced(z) + cmath.phase(1.0 - z) * math.log(abs(z))
    return sign * d


def bloch_wigner_many(zs) -> np.ndarray:
    arr = np.asarray(zs, dtype=complex)
    out = np.empty(arr.shape, dtype=float)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        z = flat_in[i]
        flat_out[i] = bloch_wigner(float(z.real), float(z.imag))
    return out
