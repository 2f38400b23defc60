import json
import math
import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from volint.errors import DegreeError, SchemaError, SizeLimitError, ValueSemanticsError
from volint.lattice_chains import (
    LatticeChain, LatticeCochain, boundary, coboundary, constant_cochain, cup,
    euclidean_volume_cocycle, evaluate, exact_det, fundamental_cycle, normalize_simplex,
    pullback, random_chain, simplex_chain, spot_check_invariance, zero_cochain,
)

E1, E2 = (1, 0), (0, 1)
O2 = (0, 0)


def test_fundamental_cycle_n1():
    assert fundamental_cycle(1) == simplex_chain([(0,), (1,)])


def test_fundamental_cycle_n2_matches_formula():
    expected = simplex_chain([O2, E1, (1, 1)]) - simplex_chain([O2, E2, (1, 1)])
    assert fundamental_cycle(2) == expected


@pytest.mark.parametrize("n", range(1, 8))
def test_fundamental_cycle_shape(n):
    z = fundamental_cycle(n)
    assert len(z) == math.factorial(n)
    assert all(abs(c) == 1 for _, c in z.items())
    assert boundary(z).is_zero()


@pytest.mark.parametrize("n", range(1, 7))
def test_volume_of_fundamental_cycle(n):
    assert evaluate(euclidean_volume_cocycle(n), fundamental_cycle(n)) == 1


def test_fundamental_cycle_cap():
    with pytest.raises(SizeLimitError):
        fundamental_cycle(9)
    assert len(fundamental_cycle(9, cap=9)) == math.factorial(9)


def test_boundary_examples():
    assert boundary(simplex_chain([(0,), (1,)])).is_zero()
    got = boundary(simplex_chain([O2, E1, E2]))
    want = (simplex_chain([O2, (-1, 1)]) - simplex_chain([O2, E2])) + simplex_chain([O2, E1])
    assert got == want


def test_boundary_degree_zero_rejected():
    with pytest.raises(DegreeError):
        boundary(simplex_chain([O2]))


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_boundary_squared_is_zero(seed, dim, degree):
    c = random_chain(random.Random(seed), dim, degree)
    if degree >= 2:
        assert boundary(boundary(c)).is_zero()


def test_normalize_simplex():
    assert normalize_simplex([(2, 3), (3, 3)]) == ((0, 0), (1, 0))
    with pytest.raises(SchemaError):
        normalize_simplex([(1, 2), (1,)])


def test_volume_cocycle_examples():
    v2 = euclidean_volume_cocycle(2)
    assert v2(O2, E1, E2) == Fraction(1, 2)
    assert v2(O2, E1, (1, 1)) == Fraction(1, 2)
    assert v2(O2, E1, E1) == 0


def test_exact_det_against_permutation_expansion():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(1, 4)
        m = [[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        leibniz = Fraction(0)
        for p in permutations(range(n)):
            sign = (-1) ** sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
            leibniz += sign * math.prod((m[i][p[i]] for i in range(n)), start=Fraction(1))
        assert exact_det(m) == leibniz


def test_coboundary_of_volume_vanishes_on_random_tuples():
    dv = coboundary(euclidean_volume_cocycle(3))
    rng = random.Random(11)
    for _ in range(1000):
        pts = [tuple(rng.randint(-4, 4) for _ in range(3)) for _ in range(5)]
        assert dv(*pts) == 0


def test_coboundary_of_constant_is_zero():
    assert coboundary(constant_cochain(3))(O2, E1) == 0


@given(st.integers(0, 10_000), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_adjointness(seed, degree):
    rng = random.Random(seed)
    dim = 2
    c = random_chain(rng, dim, degree + 1)
    table = {}

    def alpha_ev(*pts):
        key = normalize_simplex(pts)
        if key not in table:
            table[key] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        return table[key]

    alpha = LatticeCochain(degree, alpha_ev)
    assert evaluate(coboundary(alpha), c) == evaluate(alpha, boundary(c))


def test_cup_examples():
    a, b = constant_cochain(Fraction(2, 3)), constant_cochain(5)
    assert cup(a, b)(O2) == Fraction(10, 3)
    v = euclidean_volume_cocycle(2)
    assert cup(v, zero_cochain(1))(O2, E1, E2, (3, 1)) == 0


def test_cup_of_cocycles_is_cocycle():
    v1 = euclidean_volume_cocycle(1)
    prod = coboundary(cup(v1, v1))
    rng = random.Random(5)
    for _ in range(200):
        pts = [(rng.randint(-5, 5),) for _ in range(4)]
        assert prod(*pts) == 0


def test_circle_value_semantics():
    rot = LatticeCochain(1, lambda g, h: Fraction(h[0] - g[0], 3), "circle")
    with pytest.raises(ValueSemanticsError):
        cup(rot, rot)
    half = LatticeCochain(0, lambda g: Fraction(1, 2))
    with pytest.raises(ValueSemanticsError):
        cup(half, rot)((0,), (1,))
    assert cup(constant_cochain(2), rot)((0,), (2,)) == Fraction(1, 3)
    assert evaluate(rot, 4 * simplex_chain([(0,), (1,)])) == Fraction(1, 3)
    with pytest.raises(ValueSemanticsError):
        evaluate(rot, Fraction(1, 2) * simplex_chain([(0,), (1,)]))
    with pytest.raises(ValueSemanticsError):
        LatticeCochain(1, lambda *g: 0, "complex")


def test_evaluate_degree_mismatch_and_zero_chain():
    with pytest.raises(DegreeError):
        evaluate(euclidean_volume_cocycle(2), fundamental_cycle(3))
    assert evaluate(euclidean_volume_cocycle(2), LatticeChain.zero(2, 2)) == 0


def test_cochain_arity_checked():
    with pytest.raises(DegreeError):
        euclidean_volume_cocycle(2)(O2, E1)


def test_real_cochain_evaluation():
    v = euclidean_volume_cocycle(2)
    real = LatticeCochain(2, lambda *p: float(v(*p)), "real")
    assert evaluate(real, fundamental_cycle(2)) == pytest.approx(1.0, abs=1e-15)


def test_translation_invariance_of_builtins():
    rng = random.Random(0)
    for n in (1, 2, 3):
        assert spot_check_invariance(euclidean_volume_cocycle(n), n, rng)
    assert not spot_check_invariance(LatticeCochain(0, lambda g: Fraction(g[0])), 1, rng)


def test_pullback_along_linear_map():
    # doubling map multiplies the volume of the fundamental cycle by 2^n
    v = euclidean_volume_cocycle(2)
    pb = pullback(v, lambda p: (2 * p[0], 2 * p[1]))
    assert evaluate(pb, fundamental_cycle(2)) == 4


def test_chain_algebra_and_json_round_trip():
    z = fundamental_cycle(3)
    assert (z - z).is_zero()
    assert -(-z) == z
    assert Fraction(1, 2) * z + Fraction(1, 2) * z == z
    text = z.dumps()
    assert LatticeChain.from_json(json.loads(text)) == z
    assert z.dumps() == fundamental_cycle(3).dumps()
    with pytest.raises(SchemaError):
        LatticeChain.from_json({"dim": 2})
