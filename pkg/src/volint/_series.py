"""Power-series coefficients shared by the compiled and pure-Python kernels."""
from __future__ import annotations

from fractions import Fraction
from math import factorial

N_TERMS = 30


def bernoulli_numbers(count: int) -> list[Fraction]:
    """B_0 .. B_{count-1}, with the convention B_1 = -1/2."""
    b = [Fraction(0)] * count
    b[0] = Fraction(1)
    for n in range(1, count):
        acc = Fraction(0)
        binom = 1
        for k in range(n):
            acc += binom * b[k]
            binom = binom * (n + 1 - k) // (k + 1)
        b[n] = -acc / (n + 1)
    return b


_B = bernoulli_numbers(2 * N_TERMS + 2)

# Cl2(x) = x - x log|x| + sum_k CLAUSEN[k-1] x^(2k+1), |x| < 2pi
CLAUSEN = tuple(
    float(abs(_B[2 * k]) / (2 * k * factorial(2 * k + 1))) for k in range(1, N_TERMS + 1)
)

# Li2(z) = u - u^2/4 + sum_k DILOG[k-1] u^(2k+1), u = -log(1-z)
DILOG = tuple(float(_B[2 * k] / factorial(2 * k + 1)) for k in range(1, N_TERMS + 1))
