from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from g2fourier.algebra_core import (
    MonicCubic,
    PolynomialParseError,
    RationalInterval,
    discriminant,
    is_totally_real,
    isolate_real_roots,
    max_abs_root_bound,
    poly_deriv,
    poly_eval,
    resultant,
)

coef = st.integers(-50, 50)
cubics = st.builds(MonicCubic, coef, coef, coef)


def exact_real_roots(p):
    """Distinct real roots with multiplicity, from sympy's exact root isolation."""
    poly = sympy.Poly([1, p.a2, p.a1, p.a0], sympy.Symbol("t"))
    roots = poly.real_roots()
    out = []
    for r in roots:
        if out and out[-1][0] == r:
            out[-1][1] += 1
        else:
            out.append([r, 1])
    return [(float(r.evalf(30)), m) for r, m in out]


def sympy_disc(p):
    t = sympy.Symbol("t")
    return int(sympy.discriminant(t ** 3 + p.a2 * t ** 2 + p.a1 * t + p.a0, t))


@pytest.mark.parametrize("text,disc", [("t^3-3t-1", 81), ("t^3", 0), ("t^3-t^2-2t+1", 49), ("t^3-2", -108)])
def test_discriminant_examples(text, disc):
    assert discriminant(MonicCubic.parse(text)) == disc


@given(cubics)
def test_discriminant_matches_sympy(p):
    assert discriminant(p) == sympy_disc(p)


@given(cubics)
def test_discriminant_is_minus_resultant(p):
    assert discriminant(p) == -resultant(p.coeffs, poly_deriv(p.coeffs))


def test_cube_root_of_two_interval():
    (iv,) = isolate_real_roots(MonicCubic.parse("t^3-2"), Fraction(1, 100))
    assert iv.width <= Fraction(1, 100)
    assert Fraction(125, 100) <= iv.lo and iv.hi <= Fraction(127, 100)


def test_three_roots_of_t3_minus_t():
    ivs = isolate_real_roots(MonicCubic.parse("t^3-t"), Fraction(1, 4))
    assert len(ivs) == 3
    for iv, root in zip(ivs, (-1, 0, 1)):
        assert iv.contains(root)


def test_multiple_root_is_reported_once():
    ivs = isolate_real_roots(MonicCubic.parse("(t-1)^2(t+2)"), Fraction(1, 10))
    assert sorted(iv.multiplicity for iv in ivs) == [1, 2]


@settings(max_examples=200)
@given(cubics)
def test_root_count_follows_disc_sign(p):
    d = discriminant(p)
    ivs = isolate_real_roots(p, Fraction(1, 1000))
    if d > 0:
        assert len(ivs) == 3
    elif d < 0:
        assert len(ivs) == 1


@settings(max_examples=100)
@given(cubics)
def test_intervals_bracket_roots(p):
    ivs = isolate_real_roots(p, Fraction(1, 1000))
    distinct = exact_real_roots(p)
    assert len(ivs) == len(distinct)
    for iv, (r, mult) in zip(ivs, distinct):
        assert float(iv.lo) - 1e-12 <= r <= float(iv.hi) + 1e-12
        assert iv.multiplicity == mult


@given(cubics)
def test_refine_never_widens(p):
    if discriminant(p) == 0:
        return
    for iv in isolate_real_roots(p, Fraction(1, 2)):
        r = iv.refine(p.coeffs)
        assert iv.lo <= r.lo and r.hi <= iv.hi
        assert r.width <= iv.width


@pytest.mark.parametrize("text,expected", [("t^3-t^2-2t+1", True), ("t^3-2", False), ("t^3", True)])
def test_totally_real(text, expected):
    assert is_totally_real(MonicCubic.parse(text)) is expected


@pytest.mark.parametrize("text,bound", [("t^3-t^2-2t+1", 2), ("t^3-t^2-54t+169", 9), ("t^3", 0)])
def test_max_abs_root_bound(text, bound):
    assert max_abs_root_bound(MonicCubic.parse(text)) == bound


@given(cubics)
def test_bound_is_tight(p):
    b = max_abs_root_bound(p)
    biggest = max(abs(r) for r, _ in exact_real_roots(p))
    assert biggest <= b + 1e-9
    assert b == 0 or biggest > b - 1 - 1e-9


@given(cubics)
def test_string_round_trip(p):
    assert MonicCubic.parse(str(p)) == p


@pytest.mark.parametrize("text", ["(t-1)(t^2-2)", "t**3 - 2*t + 1", "t^3-t^2-54t+169", " t ^ 3 "])
def test_parse_forms(text):
    p = MonicCubic.parse(text)
    assert MonicCubic.parse(str(p)) == p


def test_product_parse_expands():
    assert MonicCubic.parse("(t-1)(t^2-2)") == MonicCubic(-1, -2, 2)


@pytest.mark.parametrize("text", ["t^2+1", "2t^3", "x^3", "t^3+", "t^3 1/2", ""])
def test_parse_rejects(text):
    with pytest.raises(PolynomialParseError):
        MonicCubic.parse(text)


def test_interval_validation():
    with pytest.raises(ValueError):
        RationalInterval(Fraction(1), Fraction(0))
