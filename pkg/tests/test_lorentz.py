import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from volint.errors import DegeneracyError, InputError, SchemaError
from volint.lorentz import (
    Case, Kind, LorentzMatrix, a_matrix, axis_swap_fixed_point, classify,
    common_invariant_structure, decompose_P, form, identity, in_P, m_matrix, n_matrix, q,
    random_lorentz, random_so, rotation2, t0_residual, torus_matrix,
)

seeds = st.integers(0, 2**32 - 1)


def light_ray(n, sign):
    v = np.zeros(n + 1)
    v[0], v[n] = sign, 1.0
    return v


def preserves_form(a, tol=1e-10):
    j = form(a.shape[0] - 1)
    return np.max(np.abs(a.T @ j @ a - j)) < tol


def test_a_matrix_laws():
    assert a_matrix(0, 4).allclose(identity(4), 1e-15)
    assert (a_matrix(1, 4) @ a_matrix(2, 4)).allclose(a_matrix(3, 4), 1e-12)


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_one_parameter_laws(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=3), rng.normal(size=3)
    assert (n_matrix(x) @ n_matrix(y)).allclose(n_matrix(x + y), 1e-10)
    u, v = random_so(3, rng), random_so(3, rng)
    assert (m_matrix(u) @ m_matrix(v)).allclose(m_matrix(u @ v), 1e-10)
    for mat in (n_matrix(x), m_matrix(u), a_matrix(rng.normal(), 4)):
        assert preserves_form(mat.entries)
        LorentzMatrix(mat.entries)


def test_n_matrix_preserves_q_on_vectors():
    rng = np.random.default_rng(0)
    nx = n_matrix([1.0, 0.0, 0.0])
    for _ in range(100):
        v = rng.normal(size=5)
        assert abs(q(nx @ v) - q(v)) < 1e-10


def test_constructor_validation():
    with pytest.raises(InputError):
        m_matrix([[1, 1], [0, 1]])
    with pytest.raises(InputError):
        m_matrix([[1, 0], [0, -1]])
    with pytest.raises(InputError):
        LorentzMatrix(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(InputError):
        LorentzMatrix(np.diag([-1.0, 1.0, 1.0]))
    with pytest.raises(InputError):
        LorentzMatrix(np.eye(3)[:2])


def test_epsilon_multiplicative_on_mixed_products():
    rng = np.random.default_rng(5)
    flips = [np.diag([-1.0, -1.0, 1.0, 1.0, 1.0]), np.diag([-1.0, 1.0, 1.0, 1.0, -1.0]),
             np.diag([1.0, 1.0, 1.0, -1.0, -1.0]), np.eye(5)]
    for _ in range(100):
        a = LorentzMatrix(flips[rng.integers(4)] @ random_lorentz(4, rng).entries)
        b = LorentzMatrix(flips[rng.integers(4)] @ random_lorentz(4, rng).entries)
        assert (a @ b).epsilon == a.epsilon * b.epsilon


def test_epsilon_values():
    assert identity(2).epsilon == 1
    assert LorentzMatrix(np.diag([-1.0, 1.0, -1.0])).epsilon == -1
    assert LorentzMatrix(np.diag([1.0, -1.0, -1.0])).epsilon == -1
    assert LorentzMatrix(np.diag([-1.0, -1.0, 1.0])).epsilon == 1


@pytest.mark.parametrize("n", [3, 5])
def test_classify_known_kinds(n):
    h = classify(a_matrix(1.0, n))
    assert h.kind is Kind.HYPERBOLIC
    ends = {tuple(np.round(r, 9)) for r in h.fixed_rays}
    assert ends == {tuple(light_ray(n, 1.0)), tuple(light_ray(n, -1.0))}
    u = np.eye(n - 1)
    u[:2, :2] = rotation2(0.7)
    e = classify(m_matrix(u))
    assert e.kind is Kind.ELLIPTIC
    assert np.allclose(e.fixed_point, np.eye(n + 1)[n], atol=1e-9)
    x = np.zeros(n - 1)
    x[0] = 1.0
    p = classify(n_matrix(x))
    assert p.kind is Kind.PARABOLIC
    assert np.allclose(p.fixed_rays[0], light_ray(n, -1.0), atol=1e-6)


def test_attracting_endpoint_first():
    h = classify(a_matrix(1.0, 2))
    attracting = h.fixed_rays[0]
    assert np.allclose(a_matrix(1.0, 2) @ attracting, np.e * attracting)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_classify_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    g = random_lorentz(n, rng)
    u = random_so(n - 1, rng)
    x = rng.normal(size=n - 1)
    for a, kind in ((a_matrix(0.8, n), Kind.HYPERBOLIC), (n_matrix(x), Kind.PARABOLIC)):
        assert classify(a.conjugate_by(g)).kind is kind
    r = torus_matrix([rotation2(1.1)] + [rotation2(0.3)] * ((n - 2) // 2)) if n % 2 == 0 else None
    if r is not None:
        assert classify(r.conjugate_by(g)).kind is Kind.ELLIPTIC


def test_classify_identity_is_elliptic():
    assert classify(identity(3)).kind is Kind.ELLIPTIC


def test_torus_matrix_and_t0_residual():
    t = torus_matrix([rotation2(0.4), rotation2(1.3)])
    assert t0_residual(t) < 1e-15
    assert t0_residual(a_matrix(1.0, 4)) > 0.1


def test_common_structure_into_p():
    case = common_invariant_structure([a_matrix(1.0, 4), identity(4)])
    assert case.case is Case.INTO_P
    assert case.residual < 1e-9


def test_common_structure_parabolic_family():
    rng = np.random.default_rng(2)
    g = random_lorentz(3, rng)
    fam = [n_matrix([1.0, 0.0]).conjugate_by(g), n_matrix([0.0, 2.0]).conjugate_by(g)]
    case = common_invariant_structure(fam)
    assert case.case is Case.INTO_P
    assert case.residual < 1e-8


def test_common_structure_block_diagonal_identity_conjugator():
    fam = [torus_matrix([rotation2(0.3), rotation2(0.0)]),
           torus_matrix([rotation2(0.0), rotation2(1.2)])]
    case = common_invariant_structure(fam)
    assert case.case is Case.INTO_T0
    assert case.residual < 1e-12


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_torus_recovery_round_trip(seed):
    rng = np.random.default_rng(seed)
    g = random_lorentz(4, rng)
    fam = [torus_matrix([rotation2(rng.uniform(0, 6)), rotation2(rng.uniform(0, 6))]).conjugate_by(g)
           for _ in range(3)]
    case = common_invariant_structure(fam, seed=seed)
    assert case.case is Case.INTO_T0
    assert case.residual < 1e-8
    for b in fam:
        assert t0_residual(b.conjugate_by(case.conjugator)) < 1e-8


def test_common_structure_rejects_noncommuting():
    with pytest.raises(InputError):
        common_invariant_structure([a_matrix(1.0, 2), n_matrix([1.0])])
    with pytest.raises(InputError):
        common_invariant_structure([])


def test_axis_swap_fixed_point():
    # rotation by pi in the (e1, e2) plane swaps the ends of the a(t)-axis
    b = np.diag([-1.0, -1.0, 1.0, 1.0])
    p = axis_swap_fixed_point(b, light_ray(3, 1.0), light_ray(3, -1.0))
    assert np.allclose(p, [0, 0, 0, 1], atol=1e-12)
    assert np.allclose(b @ p, p)


def test_decompose_identity():
    U, t, x = decompose_P(identity(4))
    assert np.allclose(U, np.eye(3)) and t == pytest.approx(0.0, abs=1e-15) and np.allclose(x, 0)


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_decompose_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    u = random_so(n - 1, rng)
    t = float(rng.normal())
    x = rng.normal(size=n - 1)
    p = m_matrix(u) @ a_matrix(t, n) @ n_matrix(x)
    assert in_P(p) < 1e-12
    U, t2, x2 = decompose_P(p)
    assert np.allclose(U, u, atol=1e-10)
    assert t2 == pytest.approx(t, abs=1e-10)
    assert np.allclose(x2, x, atol=1e-10)


def test_decompose_a_then_n_recovers_t():
    x = np.random.default_rng(1).normal(size=2)
    assert decompose_P(a_matrix(1.0, 3) @ n_matrix(x))[1] == pytest.approx(1.0, abs=1e-12)


def test_decompose_rejects_non_p():
    with pytest.raises(InputError):
        decompose_P(torus_matrix([rotation2(1.0), rotation2(0.5)]))


def test_matrix_json():
    a = a_matrix(0.5, 3)
    assert LorentzMatrix.loads(json.dumps(a.to_json())).allclose(a, 1e-15)
    with pytest.raises(SchemaError):
        LorentzMatrix.loads('{"n": 3, "rows": [[1, 0], [0, 1]]}')
    with pytest.raises(SchemaError):
        LorentzMatrix.loads("not json")


def test_near_parabolic_loxodromic_is_ambiguous():
    with pytest.raises(DegeneracyError):
        classify(a_matrix(1e-7, 3) @ n_matrix([1e-3, 0.0]), tol=1e-20)
