from fractions import Fraction

import pytest
import sympy
from sympy.polys.numberfields.basis import round_two
from hypothesis import assume, given, settings, strategies as st

from g2fourier.algebra_core import MonicCubic, discriminant
from g2fourier.cubic_rings import (
    BalancedPair,
    CubicRing,
    FracIdeal,
    NotBalancedError,
    UndecidedAtCap,
    ZeroDivisorError,
    classes_QR,
    delta_R,
    embedding_signs,
    gram_orthonormalize,
    hnf_rows,
    ideal_norm,
    inverse_different,
    is_balanced,
    is_maximal,
    is_totally_positive,
    matrix_to_pair,
    mu2_elements,
    pair_to_matrix,
    pairs_equivalent,
    quadratic_monogenic_witness,
    sqrt_in_E,
)
from g2fourier.qp_kernel import enumerate_qp, orbit_decompose, so3z_elements

R2 = CubicRing(MonicCubic.parse("t^3-2"))
R7 = CubicRing(MonicCubic.parse("t^3-t^2-2t+1"))

rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elems(ring):
    return st.builds(lambda a, b, c: ring.elem(a, b, c), rat, rat, rat)


def test_basic_arithmetic_examples():
    th = R2.theta
    assert th * (th * th) == 2
    for ring in (R2, R7):
        assert ring.theta.norm() == -ring.p.a0
        assert ring.theta.trace() == -ring.p.a2


@given(elems(R7), elems(R7), elems(R7))
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()


@given(elems(R7))
def test_inverse(x):
    assume(not x.is_zero())
    assert x * x.inverse() == 1


def test_zero_divisor_rejected():
    ring = CubicRing(MonicCubic.parse("(t-1)(t^2-2)"))
    with pytest.raises(ZeroDivisorError):
        (ring.theta - 1).inverse()


@given(elems(R7))
def test_charpoly_against_sympy(x):
    t = sympy.Symbol("t")
    m = sympy.Matrix(x.regular_matrix())
    tr, s2, n = x.charpoly()
    assert m.charpoly(t).all_coeffs() == [1, -tr, s2, -n]


def test_total_positivity_examples():
    assert is_totally_positive(R7.one)
    assert not is_totally_positive(-R7.one)
    assert not is_totally_positive(R7.theta)
    assert embedding_signs(R7.theta) == [-1, 1, 1]
    with pytest.raises(ValueError):
        is_totally_positive(R2.one)


@settings(max_examples=50)
@given(elems(R7))
def test_signs_against_floats(x):
    import numpy as np

    roots = sorted(np.roots([1, -1, -2, 1]).real)
    exact = embedding_signs(x)
    for r, s in zip(roots, exact):
        v = float(x.coords[0]) + float(x.coords[1]) * r + float(x.coords[2]) * r * r
        if abs(v) > 1e-9:
            assert s == (1 if v > 0 else -1)


def test_sign_of_element_vanishing_at_a_root():
    ring = CubicRing(MonicCubic.parse("(t-1)(t^2-2)"))
    assert 0 in embedding_signs(ring.theta - 1)
    assert not is_totally_positive(ring.theta - 1)


def test_inverse_different_examples():
    d = inverse_different(R2)
    th = R2.theta
    assert d == FracIdeal.principal((3 * th * th).inverse())
    assert ideal_norm(d) == Fraction(1, 108)
    for x in d.elems():
        for b in R2.basis():
            assert (x * b).trace().denominator == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(-10, 10), st.integers(-30, 30), st.integers(-30, 30))
def test_inverse_different_random(a2, a1, a0):
    p = MonicCubic(a2, a1, a0)
    assume(discriminant(p) != 0)
    d = inverse_different(CubicRing(p))
    assert ideal_norm(d) == Fraction(1, abs(discriminant(p)))


def test_ideal_norm_examples():
    unit = FracIdeal.unit(R2)
    assert ideal_norm(unit) == 1
    assert ideal_norm(unit * 2) == 8
    assert ideal_norm(FracIdeal.principal(R2.theta)) == 2


def test_ideal_rejects_non_module():
    with pytest.raises(ValueError):
        FracIdeal(R2, [[1, 0, 0], [0, 2, 0], [0, 0, 1]])


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=6))
def test_hnf_is_canonical(rows):
    m = sympy.Matrix(rows)
    assume(m.rank() == 3)
    h = hnf_rows(rows)
    # same lattice: each side expresses the other with integer coefficients
    hm = sympy.Matrix(h)
    for r in rows:
        sol = hm.T.solve(sympy.Matrix(r))
        assert all(x.is_integer for x in sol)
    assert all(h[i][j] == 0 for i in range(3) for j in range(i))
    assert all(h[i][i] > 0 for i in range(3))
    assert all(0 <= h[j][i] < h[i][i] for i in range(3) for j in range(i))
    shuffled = list(reversed(rows)) + [[a + b for a, b in zip(rows[0], rows[1])]]
    assert hnf_rows(shuffled) == h


def test_is_balanced_examples():
    assert not is_balanced(FracIdeal.unit(R2), R2.one)
    pair = matrix_to_pair(enumerate_qp(R7.p).matrices[0], R7)
    assert is_balanced(pair.ideal, pair.mu)
    assert pair.ideal * pair.ideal * pair.mu == inverse_different(R7)
    beta = R7.elem(2, -1, 1)
    assert is_balanced(pair.ideal * beta, pair.mu / (beta * beta))


@pytest.mark.parametrize("text", ["t^3-t^2-2t+1", "t^3-t^2-9t+10", "(t-1)(t^2-2)", "(t-3)(t^2-10)"])
def test_round_trip_stays_in_orbit(text):
    ring = CubicRing(MonicCubic.parse(text))
    res = orbit_decompose(enumerate_qp(ring.p))
    group = so3z_elements()
    for o in res.orbits:
        orbit = {o.rep.conjugate(g).key() for g in group}
        base = matrix_to_pair(o.rep, ring)
        for g in group:
            t = o.rep.conjugate(g)
            pair = matrix_to_pair(t, ring)
            assert pair_to_matrix(pair).key() in orbit
            assert pairs_equivalent(pair, base)


def test_distinct_orbits_are_inequivalent():
    ring = CubicRing(MonicCubic.parse("t^3-t^2-9t+10"))
    c = classes_QR(ring)
    assert c.count == 2
    assert not pairs_equivalent(c.pairs[0], c.pairs[1])


def test_pair_to_matrix_rejects_unbalanced():
    with pytest.raises(NotBalancedError):
        pair_to_matrix(BalancedPair(FracIdeal.unit(R7), R7.one * 2))


def test_gram_orthonormalize_identity():
    assert gram_orthonormalize([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def _unimodular(moves):
    m = sympy.eye(3)
    for i, j, k in moves:
        if i != j:
            m[i, :] = m[i, :] + k * m[j, :]
    return m


unimodular = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-2, 2)), max_size=8).map(_unimodular)


@given(unimodular)
def test_gram_orthonormalize_random(m):
    g = (m.T * m).tolist()
    out = sympy.Matrix(gram_orthonormalize(g))
    assert out * sympy.Matrix(g) * out.T == sympy.eye(3)
    assert out.det() == 1


def test_sqrt_examples():
    assert sqrt_in_E(R7.one * 4) == 2
    assert sqrt_in_E(R7.theta * R7.theta) in (R7.theta, -R7.theta)
    assert sqrt_in_E(-R7.one) is None


@settings(max_examples=40, deadline=None)
@given(elems(R7))
def test_sqrt_of_squares(x):
    assume(x.norm() != 0)
    b = sqrt_in_E(x * x)
    assert b is not None and b * b == x * x


def test_sqrt_none_for_non_square():
    assert sqrt_in_E(R7.theta * R7.theta * 3) is None


def test_sqrt_undecided_at_cap_is_distinct(monkeypatch):
    import g2fourier.cubic_rings as cr

    monkeypatch.setattr(cr, "_numeric_sqrt", lambda lam, bits: None)
    monkeypatch.setattr(cr, "_trace_quartic_candidates", lambda lam: (True, []))
    with pytest.raises(UndecidedAtCap):
        sqrt_in_E(R7.one * 4)


def test_pairs_equivalent_scaling():
    pair = matrix_to_pair(enumerate_qp(R7.p).matrices[0], R7)
    other = BalancedPair(pair.ideal * 2, pair.mu / 4)
    assert pairs_equivalent(pair, other)
    assert pairs_equivalent(other, pair)
    assert pairs_equivalent(pair, pair)


def test_classes_examples():
    assert (classes_QR(R7).count, delta_R(R7)) == (1, 1)
    r = CubicRing(MonicCubic.parse("t^3-t^2-9t+8"))
    assert (classes_QR(r).count, delta_R(r)) == (0, 0)
    assert classes_QR(CubicRing(MonicCubic.parse("t^3-t^2-54t+169"))).count == 4


@pytest.mark.parametrize("text,expected", [
    ("t^3-3t-1", True),
    ("t^3-t^2-54t+169", True),
    # Z[t]/(t^3 - t) has discriminant 4 and index 2 in Z^3, so it is not maximal
    ("t^3-t", False),
    ("t^3-2", True),
    ("t^3-t^2-2t+1", True),
    # theta = 2 cbrt(2), and theta^2 / 4 is integral but not in Z[theta]
    ("t^3-16", False),
])
def test_is_maximal(text, expected):
    assert is_maximal(CubicRing(MonicCubic.parse(text))) is expected


@settings(max_examples=40, deadline=None)
@given(st.integers(-6, 6), st.integers(-20, 20), st.integers(-20, 20))
def test_is_maximal_against_sympy_field_discriminant(a2, a1, a0):
    t = sympy.Symbol("t")
    f = t ** 3 + a2 * t ** 2 + a1 * t + a0
    assume(sympy.Poly(f, t).is_irreducible)
    d = discriminant(MonicCubic(a2, a1, a0))
    dk = round_two(sympy.Poly(f, t, domain="ZZ"))[1]
    assert is_maximal(CubicRing(MonicCubic(a2, a1, a0))) is (int(dk) == d)


def test_quadratic_witness():
    w = quadratic_monogenic_witness(2)
    assert w["r"] == 1 and w["charpoly"] == MonicCubic.parse("(t-1)(t^2-2)")
    w = quadratic_monogenic_witness(3)
    assert w["r"] == 2 and w["charpoly"] == MonicCubic.parse("(t-2)(t^2-3)")
    assert quadratic_monogenic_witness(10)["charpoly"] == MonicCubic.parse("(t-3)(t^2-10)")
    assert quadratic_monogenic_witness(7) is None


@given(st.integers(1, 200))
def test_quadratic_witness_exhaustive(ell):
    w = quadratic_monogenic_witness(ell)
    expected = any(r * r in (ell - 1, ell + 1) for r in range(0, 20))
    assert (w is not None) == expected
    w = quadratic_monogenic_witness(ell, "half")
    expected = any(r * (r - 1) in (ell - 1, ell + 1) for r in range(0, 20))
    assert (w is not None) == expected
    if w is not None:
        c = w["charpoly"]
        r = w["r"]
        assert c(r) == 0


def test_mu2_orders():
    assert len(mu2_elements(R7)) == 2
    ring = CubicRing(MonicCubic.parse("(t-3)(t^2-10)"))
    units = mu2_elements(ring)
    assert len(units) == 4 and all(u * u == 1 for u in units)
    split = CubicRing(MonicCubic.parse("t^3-t"))
    assert len(mu2_elements(split)) == 8


def test_json_round_trip():
    pair = matrix_to_pair(enumerate_qp(R7.p).matrices[3], R7)
    again = BalancedPair.from_json(R7, pair.to_json())
    assert again.ideal == pair.ideal and again.mu == pair.mu
