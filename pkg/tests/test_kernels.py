import cmath
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from volint import _pykernels, kernels
from volint._series import CLAUSEN, DILOG, bernoulli_numbers
from volint.circle_cocycles import orientation_cocycle


def bloch_wigner_mpmath(z):
    z = mpmath.mpc(z)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


def test_bernoulli_numbers_match_sympy_values():
    b = bernoulli_numbers(11)
    assert b[:5] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    assert b[10] == Fraction(5, 66)


def test_series_coefficients_decay():
    assert CLAUSEN[0] == pytest.approx(1 / 72, rel=1e-15)
    assert DILOG[0] == pytest.approx(1 / 36, rel=1e-15)
    assert abs(float(CLAUSEN[-1])) * math.pi ** 61 < 1e-12


def test_backend_reports_name():
    assert kernels.BACKEND in ("python", "cython")


def test_orientation_kernel_matches_cocycle(backend):
    rng = random.Random(7)
    for _ in range(2000):
        L = rng.randint(1, 40)
        a, b, c = (rng.randrange(L) for _ in range(3))
        expected = orientation_cocycle(Fraction(a, L), Fraction(b, L), Fraction(c, L))
        assert backend.orientation_int(a, b, c, L) == expected


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kappa_kernel_parity(backend, m):
    rng = random.Random(m)
    for _ in range(20):
        L = rng.randint(1, 30)
        gens = [[rng.randrange(L) for _ in range(m)] for _ in range(2 * m - 1)]
        assert backend.kappa_pairing_num(gens, L, m) == _pykernels.kappa_pairing_num(gens, L, m)


def test_kappa_kernel_m1_is_the_angle(backend):
    assert backend.kappa_pairing_num([[2]], 7, 1) == 2


def test_lobachevsky_against_mpmath(backend):
    for theta in np.linspace(-4.0, 4.0, 161):
        expected = float(mpmath.clsin(2, 2 * theta)) / 2
        assert backend.lobachevsky(float(theta)) == pytest.approx(expected, abs=1e-14)


def test_lobachevsky_many_matches_scalar(backend):
    thetas = np.linspace(0.01, 3.1, 50)
    many = backend.lobachevsky_many(thetas)
    assert np.allclose(many, [backend.lobachevsky(float(t)) for t in thetas], atol=0, rtol=0)


@given(st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=300, deadline=None)
def test_bloch_wigner_against_mpmath(re, im):
    z = complex(re, im)
    if abs(z) < 1e-6 or abs(1 - z) < 1e-6:
        return
    assert kernels.bloch_wigner(re, im) == pytest.approx(bloch_wigner_mpmath(z), abs=1e-12)


def test_bloch_wigner_parity(backend):
    rng = np.random.default_rng(3)
    zs = rng.normal(size=200) + 1j * rng.normal(size=200)
    a = backend.bloch_wigner_many(zs)
    b = _pykernels.bloch_wigner_many(zs)
    assert np.max(np.abs(a - b)) < 1e-14


def test_bloch_wigner_regular_tetrahedron(backend):
    w = cmath.exp(1j * math.pi / 3)
    assert backend.bloch_wigner(w.real, w.imag) == pytest.approx(1.0149416064096536, abs=1e-15)
